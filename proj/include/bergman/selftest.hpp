#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace bergman {

struct SelfCheck {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Geometry invariants on seeded random points: Möbius involution, F_a(0) = a,
/// the 1 − |F_a(z)|² identity (n = 1, 2, 3), Bergman ball volumes and the
/// mean-value equality (n = 1, 2), and the one-variable Green closed form.
std::vector<SelfCheck> geometry_selftest(std::uint64_t seed = 1);

}  // namespace bergman
