#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <unistd.h>

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("kandistill_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// WADI-shaped CSV: Row/Date/Time metadata, 127 sensor columns of which 4
// are entirely empty, then a textual label column. 131 columns total.
inline void write_wadi_fixture(const std::string& path, int n_rows, unsigned seed = 1234) {
    std::ofstream out(path);
    out << "Row,Date,Time";
    for (int c = 0; c < 127; ++c) out << ",S_" << c;
    out << ",label\n";
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (int r = 0; r < n_rows; ++r) {
        out << r << ",9/25/17," << (r % 24) << ":00:00";
        for (int c = 0; c < 127; ++c) {
            if (c % 30 == 7) {
                out << ","; // 4 all-empty columns: c = 7, 37, 67, 97
            } else {
                out << "," << value(rng);
            }
        }
        out << "," << (r % 10 == 3 ? "Attack" : "Normal") << "\n";
    }
}

} // namespace testutil
