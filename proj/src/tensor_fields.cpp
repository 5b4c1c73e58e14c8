#include "macelast/tensor_fields.hpp"

#include <cmath>
#include <stdexcept>

namespace macelast {

std::size_t shear_slot(int a, int b)
{
    if (a > b) {
        std::swap(a, b);
    }
    if (a == 0 && b == 1) return 0;
    if (a == 0 && b == 2) return 1;
    if (a == 1 && b == 2) return 2;
    throw std::invalid_argument("shear_slot: need two distinct axes in 0..2");
}

StressFields StressFields::zeros(const GridPtr& grid)
{
    StressFields s;
    const int d = grid->dims();
    for (int a = 0; a < d; ++a) {
        s.normal.emplace_back(grid, GridLocation::kCell);
    }
    s.shear.emplace_back(grid, shear_location(0, 1, d));
    if (d == 3) {
        s.shear.emplace_back(grid, shear_location(0, 2, d));
        s.shear.emplace_back(grid, shear_location(1, 2, d));
    }
    return s;
}

DisplacementFields DisplacementFields::zeros(const GridPtr& grid)
{
    DisplacementFields w;
    for (int a = 0; a < grid->dims(); ++a) {
        w.comp.emplace_back(grid, face_location(a));
    }
    return w;
}

double norm(const StressFields& s)
{
    double sum = 0.0;
    for (const auto& f : s.normal) {
        sum += inner_product(f, f);
    }
    for (const auto& f : s.shear) {
        sum += inner_product(f, f);
    }
    return std::sqrt(sum);
}

double tensor_norm(const StressFields& s)
{
    double sum = 0.0;
    for (const auto& f : s.normal) {
        sum += inner_product(f, f);
    }
    for (const auto& f : s.shear) {
        sum += 2.0 * inner_product(f, f);
    }
    return std::sqrt(sum);
}

double norm(const DisplacementFields& w)
{
    double sum = 0.0;
    for (const auto& f : w.comp) {
        sum += inner_product(f, f);
    }
    return std::sqrt(sum);
}

}  // namespace macelast
