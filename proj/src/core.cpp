#include "leafseg/core.hpp"

namespace leafseg {

namespace {
void require_same_size(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("mask dimensions differ");
}
} // namespace

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b);
    BinaryMask out = a;
    auto& d = out.pixels().data();
    const auto& bd = b.pixels().data();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (bd[i]) d[i] = 255;
    return out;
}

BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b);
    BinaryMask out = a;
    auto& d = out.pixels().data();
    const auto& bd = b.pixels().data();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!bd[i]) d[i] = 0;
    return out;
}

BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a, b);
    BinaryMask out = a;
    auto& d = out.pixels().data();
    const auto& bd = b.pixels().data();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (bd[i]) d[i] = 0;
    return out;
}

BinaryMask mask_complement(const BinaryMask& a) {
    BinaryMask out = a;
    for (auto& v : out.pixels().data()) v = v ? 0 : 255;
    return out;
}

} // namespace leafseg
