#include "kandistill/model_store.hpp"

#include <cstring>

#include "kandistill/bytes.hpp"
#include "kandistill/errors.hpp"

namespace kandistill {

namespace {

constexpr char kModelMagic[4] = {'K', 'D', 'K', 'D'};
constexpr std::uint32_t kModelVersion = 1;
constexpr char kCheckpointMagic[4] = {'K', 'D', 'C', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_dims(ByteWriter& w, const std::vector<int>& dims) {
    w.u32(static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) w.u32(static_cast<std::uint32_t>(d));
}

std::vector<int> read_dims(ByteReader& r) {
    const auto n = r.u32();
    if (n < 2 || n > 1024) throw FormatError("implausible dimension count in model container");
    std::vector<int> dims(n);
    for (auto& d : dims) d = static_cast<int>(r.u32());
    return dims;
}

void write_kan(ByteWriter& w, const KanNetwork& net) {
    write_dims(w, net.dims());
    const auto& spec = net.grid_spec();
    w.u32(static_cast<std::uint32_t>(spec.grid_size));
    w.u32(static_cast<std::uint32_t>(spec.order));
    w.f64(spec.domain_lo);
    w.f64(spec.domain_hi);
    for (const auto& layer : net.layers()) {
        const int nb = layer.grid.basis_count();
        for (std::size_t e = 0; e < layer.edge_count(); ++e) {
            w.f64(layer.omega_b[e]);
            w.f64(layer.omega_s[e]);
            w.f64(layer.shift[e]);
            const double* c = layer.coeffs.data() + e * static_cast<std::size_t>(nb);
            for (int i = 0; i < nb; ++i) w.f64(c[i]);
        }
        for (double b : layer.bias) w.f64(b);
    }
}

KanNetwork read_kan(ByteReader& r) {
    const auto dims = read_dims(r);
    GridSpec spec;
    spec.grid_size = static_cast<int>(r.u32());
    spec.order = static_cast<int>(r.u32());
    spec.domain_lo = r.f64();
    spec.domain_hi = r.f64();
    KanNetwork net(dims, spec, 0);
    for (auto& layer : net.layers()) {
        const int nb = layer.grid.basis_count();
        for (std::size_t e = 0; e < layer.edge_count(); ++e) {
            layer.omega_b[e] = r.f64();
            layer.omega_s[e] = r.f64();
            layer.shift[e] = r.f64();
            double* c = layer.coeffs.data() + e * static_cast<std::size_t>(nb);
            for (int i = 0; i < nb; ++i) c[i] = r.f64();
        }
        for (auto& b : layer.bias) b = r.f64();
    }
    return net;
}

void write_mlp(ByteWriter& w, const MlpNetwork& net) {
    write_dims(w, net.dims());
    w.u8(static_cast<std::uint8_t>(net.activation()));
    for (const auto& layer : net.layers()) {
        for (double v : layer.weights) w.f64(v);
        for (double v : layer.bias) w.f64(v);
    }
}

MlpNetwork read_mlp(ByteReader& r) {
    const auto dims = read_dims(r);
    const auto act = static_cast<Activation>(r.u8());
    MlpNetwork net(dims, act, 0);
    for (auto& layer : net.layers()) {
        for (auto& v : layer.weights) v = r.f64();
        for (auto& v : layer.bias) v = r.f64();
    }
    return net;
}

ByteReader open_model_payload(const std::string& path, ModelKind& kind) {
    ByteReader r = ByteReader::from_file(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kModelMagic, 4) != 0) {
        throw FormatError(path + ": not a model container (bad magic)");
    }
    const auto version = r.u32();
    if (version != kModelVersion) {
        throw FormatError(path + ": unsupported model format version " + std::to_string(version));
    }
    const auto tag = r.u8();
    if (tag != static_cast<std::uint8_t>(ModelKind::kan) &&
        tag != static_cast<std::uint8_t>(ModelKind::mlp)) {
        throw FormatError(path + ": unknown model kind tag");
    }
    kind = static_cast<ModelKind>(tag);
    return r;
}

void append_model(ByteWriter& w, const Model& model) {
    w.raw(kModelMagic, 4);
    w.u32(kModelVersion);
    w.u8(static_cast<std::uint8_t>(model.kind()));
    if (model.kind() == ModelKind::kan) {
        write_kan(w, static_cast<const KanNetwork&>(model));
    } else {
        write_mlp(w, static_cast<const MlpNetwork&>(model));
    }
}

std::unique_ptr<Model> parse_model(ByteReader& r, ModelKind kind) {
    if (kind == ModelKind::kan) return std::make_unique<KanNetwork>(read_kan(r));
    return std::make_unique<MlpNetwork>(read_mlp(r));
}

} // namespace

void save_model(const Model& model, const std::string& path) {
    ByteWriter w;
    append_model(w, model);
    w.write_file(path);
}

std::unique_ptr<Model> load_model(const std::string& path) {
    ModelKind kind;
    ByteReader r = open_model_payload(path, kind);
    auto model = parse_model(r, kind);
    if (!r.at_end()) throw FormatError(path + ": trailing bytes in model container");
    return model;
}

KanNetwork load_kan(const std::string& path) {
    ModelKind kind;
    ByteReader r = open_model_payload(path, kind);
    if (kind != ModelKind::kan) {
        throw FormatError(path + ": model kind mismatch (container holds an MLP, expected a KAN)");
    }
    return read_kan(r);
}

MlpNetwork load_mlp(const std::string& path) {
    ModelKind kind;
    ByteReader r = open_model_payload(path, kind);
    if (kind != ModelKind::mlp) {
        throw FormatError(path + ": model kind mismatch (container holds a KAN, expected an MLP)");
    }
    return read_mlp(r);
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    if (!ckpt.model) throw InvalidArgument("checkpoint has no model");
    ByteWriter w;
    w.raw(kCheckpointMagic, 4);
    w.u32(kCheckpointVersion);
    w.u32(ckpt.epoch);
    w.f64(ckpt.running_loss);
    w.str(ckpt.rng.engine);
    w.u8(ckpt.rng.has_spare ? 1 : 0);
    w.u64(ckpt.rng.spare_bits);
    ByteWriter model;
    append_model(model, *ckpt.model);
    w.u64(model.bytes().size());
    w.raw(model.bytes().data(), model.bytes().size());
    w.write_file(path);
}

Checkpoint load_checkpoint(const std::string& path) {
    ByteReader r = ByteReader::from_file(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kCheckpointMagic, 4) != 0) {
        throw FormatError(path + ": not a checkpoint container");
    }
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
        throw FormatError(path + ": unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.epoch = r.u32();
    ckpt.running_loss = r.f64();
    ckpt.rng.engine = r.str();
    ckpt.rng.has_spare = r.u8() != 0;
    ckpt.rng.spare_bits = r.u64();
    const auto blob_size = r.u64();
    std::vector<std::uint8_t> blob(blob_size);
    r.raw(blob.data(), blob.size());
    if (!r.at_end()) throw FormatError(path + ": trailing bytes in checkpoint");

    ByteReader mr(std::move(blob));
    char mm[4];
    mr.raw(mm, 4);
    if (std::memcmp(mm, kModelMagic, 4) != 0) throw FormatError(path + ": embedded model is corrupt");
    if (mr.u32() != kModelVersion) throw FormatError(path + ": embedded model version mismatch");
    const auto tag = static_cast<ModelKind>(mr.u8());
    ckpt.model = parse_model(mr, tag);
    return ckpt;
}

} // namespace kandistill
