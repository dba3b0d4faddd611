#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace socrs {

inline constexpr int kMaxElements = 64;

// Subset of a ground set {0, ..., n-1}, n <= 64, stored as a bit mask.
class ElementSet {
public:
    constexpr ElementSet() = default;
    static constexpr ElementSet from_bits(std::uint64_t bits) { return ElementSet(bits); }
    static ElementSet of(std::initializer_list<int> elements);
    static ElementSet of(const std::vector<int>& elements);
    static constexpr ElementSet full(int n) {
        return ElementSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
    }
    static constexpr ElementSet single(int e) { return ElementSet(std::uint64_t{1} << e); }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool contains(int e) const { return (bits_ >> e) & 1u; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool subset_of(ElementSet other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr bool intersects(ElementSet other) const { return (bits_ & other.bits_) != 0; }
    constexpr ElementSet with(int e) const { return ElementSet(bits_ | (std::uint64_t{1} << e)); }
    constexpr ElementSet without(int e) const { return ElementSet(bits_ & ~(std::uint64_t{1} << e)); }
    // Largest element, or -1 when empty.
    constexpr int max_element() const { return bits_ ? 63 - std::countl_zero(bits_) : -1; }

    std::vector<int> elements() const;

    template <class F>
    void for_each(F&& f) const {
        for (std::uint64_t b = bits_; b; b &= b - 1) f(std::countr_zero(b));
    }

    constexpr ElementSet operator|(ElementSet o) const { return ElementSet(bits_ | o.bits_); }
    constexpr ElementSet operator&(ElementSet o) const { return ElementSet(bits_ & o.bits_); }
    constexpr ElementSet operator-(ElementSet o) const { return ElementSet(bits_ & ~o.bits_); }
    constexpr bool operator==(const ElementSet&) const = default;

private:
    constexpr explicit ElementSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

struct ElementSetHash {
    std::size_t operator()(ElementSet s) const noexcept { return std::hash<std::uint64_t>{}(s.bits()); }
};

// Order used for every enumeration: by size, then lexicographically by sorted element list.
bool size_lex_less(ElementSet a, ElementSet b);

std::string to_string(ElementSet s);

}  // namespace socrs
