#include "kandistill/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kandistill {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 1 - uniform() lies in (0, 1], keeping the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

RngState Rng::state() const {
    RngState s;
    std::ostringstream os;
    os << engine_;
    s.engine = os.str();
    s.has_spare = has_spare_;
    s.spare_bits = std::bit_cast<std::uint64_t>(spare_);
    return s;
}

void Rng::restore(const RngState& s) {
    std::istringstream is(s.engine);
    is >> engine_;
    has_spare_ = s.has_spare;
    spare_ = std::bit_cast<double>(s.spare_bits);
}

} // namespace kandistill
