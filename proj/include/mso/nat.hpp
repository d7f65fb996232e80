#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mso {

// Unsigned arbitrary-precision integer tuned for run counting: values below
// 2^64 live in a single machine word, and arithmetic promotes to a little-
// endian limb vector exactly at the point of overflow.  Only the operations
// counting needs are provided (+, -, *, comparisons, decimal conversion);
// subtraction below zero is a hard error, never a wrap.
class Nat {
public:
    Nat() = default;
    Nat(std::uint64_t value) : small_(value) {}

    static Nat from_decimal(std::string_view text) {
        if (text.empty())
            throw std::invalid_argument("Nat: empty decimal string");
        Nat result;
        std::size_t i = 0;
        while (i < text.size()) {
            std::size_t chunk_len = std::min<std::size_t>(text.size() - i, 19);
            std::uint64_t chunk = 0;
            std::uint64_t scale = 1;
            for (std::size_t j = 0; j < chunk_len; ++j, ++i) {
                char c = text[i];
                if (c < '0' || c > '9')
                    throw std::invalid_argument("Nat: bad digit in decimal string");
                chunk = chunk * 10 + static_cast<std::uint64_t>(c - '0');
                scale *= 10;
            }
            result.mul_small_add(scale, chunk);
        }
        return result;
    }

    bool is_zero() const { return limbs_.empty() && small_ == 0; }
    bool fits_uint64() const { return limbs_.empty(); }

    std::uint64_t to_uint64() const {
        if (!fits_uint64())
            throw std::overflow_error("Nat: value exceeds 64 bits");
        return small_;
    }

    std::string to_decimal() const {
        if (fits_uint64())
            return std::to_string(small_);
        std::vector<std::uint64_t> work = limbs_;
        std::string out;
        while (!work.empty()) {
            std::uint64_t rem = divmod_limbs(work, kDecChunk);
            std::string part = std::to_string(rem);
            if (!work.empty())
                part.insert(0, 19 - part.size(), '0');
            out.insert(0, part);
        }
        return out;
    }

    Nat& operator+=(const Nat& rhs) {
        if (this == &rhs) {
            Nat copy = rhs;
            return *this += copy;
        }
        if (limbs_.empty() && rhs.limbs_.empty()) {
            std::uint64_t sum;
            if (!__builtin_add_overflow(small_, rhs.small_, &sum)) {
                small_ = sum;
                return *this;
            }
            limbs_ = {sum, 1};  // wrapped low word plus the carry
            small_ = 0;
            return *this;
        }
        add_limbs(mutable_limbs(), rhs.view());
        normalize();
        return *this;
    }

    Nat& operator-=(const Nat& rhs) {
        if (this == &rhs) {
            *this = Nat();
            return *this;
        }
        if (*this < rhs)
            throw std::underflow_error("Nat: subtraction below zero");
        if (limbs_.empty()) {  // rhs fits too, or the comparison would have thrown
            small_ -= rhs.small_;
            return *this;
        }
        sub_limbs(limbs_, rhs.view());
        normalize();
        return *this;
    }

    Nat& operator*=(const Nat& rhs) {
        *this = *this * rhs;
        return *this;
    }

    // Fused *this += a * b; the hot path of matrix products stays word-sized.
    void add_product(const Nat& a, const Nat& b) {
        if (limbs_.empty() && a.limbs_.empty() && b.limbs_.empty()) {
            unsigned __int128 t = static_cast<unsigned __int128>(a.small_) * b.small_ + small_;
            if (t >> 64 == 0) {
                small_ = static_cast<std::uint64_t>(t);
                return;
            }
            limbs_ = {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(t >> 64)};
            small_ = 0;
            return;
        }
        *this += a * b;
    }

    friend Nat operator+(Nat lhs, const Nat& rhs) {
        lhs += rhs;
        return lhs;
    }

    friend Nat operator-(Nat lhs, const Nat& rhs) {
        lhs -= rhs;
        return lhs;
    }

    friend Nat operator*(const Nat& lhs, const Nat& rhs) {
        if (lhs.limbs_.empty() && rhs.limbs_.empty()) {
            unsigned __int128 t = static_cast<unsigned __int128>(lhs.small_) * rhs.small_;
            if (t >> 64 == 0)
                return Nat(static_cast<std::uint64_t>(t));
            Nat big;
            big.limbs_ = {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(t >> 64)};
            return big;
        }
        View a = lhs.view();
        View b = rhs.view();
        Nat result;
        result.limbs_.assign(a.n + b.n, 0);
        for (std::size_t i = 0; i < a.n; ++i) {
            if (a.p[i] == 0)
                continue;
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.n; ++j) {
                unsigned __int128 cur = static_cast<unsigned __int128>(a.p[i]) * b.p[j] +
                                        result.limbs_[i + j] + carry;
                result.limbs_[i + j] = static_cast<std::uint64_t>(cur);
                carry = static_cast<std::uint64_t>(cur >> 64);
            }
            result.limbs_[i + b.n] += carry;
        }
        result.normalize();
        return result;
    }

    friend bool operator==(const Nat& lhs, const Nat& rhs) {
        return lhs.small_ == rhs.small_ && lhs.limbs_ == rhs.limbs_;
    }

    friend std::strong_ordering operator<=>(const Nat& lhs, const Nat& rhs) {
        View a = lhs.view();
        View b = rhs.view();
        if (a.n != b.n)
            return a.n <=> b.n;
        for (std::size_t i = a.n; i-- > 0;) {
            if (a.p[i] != b.p[i])
                return a.p[i] <=> b.p[i];
        }
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Nat& n) {
        return os << n.to_decimal();
    }

private:
    struct View {
        const std::uint64_t* p;
        std::size_t n;
    };

    static constexpr std::uint64_t kDecChunk = 10000000000000000000ull;  // 10^19

    View view() const {
        if (limbs_.empty())
            return {&small_, 1};
        return {limbs_.data(), limbs_.size()};
    }

    std::vector<std::uint64_t>& mutable_limbs() {
        if (limbs_.empty()) {
            limbs_.push_back(small_);
            small_ = 0;
        }
        return limbs_;
    }

    void normalize() {
        while (!limbs_.empty() && limbs_.back() == 0)
            limbs_.pop_back();
        if (limbs_.size() == 1) {
            small_ = limbs_[0];
            limbs_.clear();
        }
    }

    static void add_limbs(std::vector<std::uint64_t>& acc, View rhs) {
        if (acc.size() < rhs.n)
            acc.resize(rhs.n, 0);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            std::uint64_t word = i < rhs.n ? rhs.p[i] : 0;
            if (word == 0 && carry == 0 && i >= rhs.n)
                break;
            unsigned __int128 cur = static_cast<unsigned __int128>(acc[i]) + word + carry;
            acc[i] = static_cast<std::uint64_t>(cur);
            carry = static_cast<std::uint64_t>(cur >> 64);
        }
        if (carry)
            acc.push_back(carry);
    }

    // Pre: acc >= rhs (checked by the caller).
    static void sub_limbs(std::vector<std::uint64_t>& acc, View rhs) {
        std::uint64_t borrow = 0;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            std::uint64_t word = i < rhs.n ? rhs.p[i] : 0;
            if (word == 0 && borrow == 0 && i >= rhs.n)
                break;
            unsigned __int128 cur = static_cast<unsigned __int128>(acc[i]) - word - borrow;
            acc[i] = static_cast<std::uint64_t>(cur);
            borrow = (cur >> 64) ? 1 : 0;
        }
    }

    static std::uint64_t divmod_limbs(std::vector<std::uint64_t>& limbs, std::uint64_t div) {
        unsigned __int128 rem = 0;
        for (std::size_t i = limbs.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | limbs[i];
            limbs[i] = static_cast<std::uint64_t>(cur / div);
            rem = cur % div;
        }
        while (!limbs.empty() && limbs.back() == 0)
            limbs.pop_back();
        return static_cast<std::uint64_t>(rem);
    }

    // *this = *this * scale + addend, with scale <= 10^19 (decimal parsing).
    void mul_small_add(std::uint64_t scale, std::uint64_t addend) {
        if (limbs_.empty()) {
            unsigned __int128 t = static_cast<unsigned __int128>(small_) * scale + addend;
            if (t >> 64 == 0) {
                small_ = static_cast<std::uint64_t>(t);
                return;
            }
            limbs_ = {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(t >> 64)};
            small_ = 0;
            return;
        }
        std::uint64_t carry = 0;
        for (auto& limb : limbs_) {
            unsigned __int128 cur = static_cast<unsigned __int128>(limb) * scale + carry;
            limb = static_cast<std::uint64_t>(cur);
            carry = static_cast<std::uint64_t>(cur >> 64);
        }
        if (carry)
            limbs_.push_back(carry);
        add_limbs(limbs_, View{&addend, 1});
        normalize();
    }

    std::uint64_t small_ = 0;
    std::vector<std::uint64_t> limbs_;  // non-empty only for values >= 2^64; top limb non-zero
};

}  // namespace mso
