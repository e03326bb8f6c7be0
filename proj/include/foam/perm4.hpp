#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace foam {

// A permutation of the four vertex slots {0,1,2,3} of a model tetrahedron.
// Used both for face gluings and for edge-link frames.
class Perm4 {
public:
    constexpr Perm4() : img_{0, 1, 2, 3} {}
    constexpr Perm4(int a, int b, int c, int d) : img_{static_cast<uint8_t>(a), static_cast<uint8_t>(b), static_cast<uint8_t>(c), static_cast<uint8_t>(d)} {}

    constexpr int operator[](int i) const { return img_[i]; }

    constexpr bool is_valid() const {
        int seen = 0;
        for (int i = 0; i < 4; ++i) {
            if (img_[i] > 3) return false;
            seen |= 1 << img_[i];
        }
        return seen == 0xF;
    }

    Perm4 inverse() const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img_[img_[i]] = static_cast<uint8_t>(i);
        return r;
    }

    // (a.then(b))[i] == b[a[i]] -- left-to-right application order.
    Perm4 then(const Perm4& b) const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img_[i] = static_cast<uint8_t>(b.img_[img_[i]]);
        return r;
    }

    // after(b)[i] == (*this)[b[i]] -- usual composition  this ∘ b.
    Perm4 after(const Perm4& b) const { return b.then(*this); }

    bool is_even() const {
        int inv = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (img_[i] > img_[j]) ++inv;
        return (inv & 1) == 0;
    }

    bool operator==(const Perm4& o) const { return img_ == o.img_; }
    bool operator!=(const Perm4& o) const { return img_ != o.img_; }
    bool operator<(const Perm4& o) const { return img_ < o.img_; }

    std::string str() const {
        std::string s(4, '0');
        for (int i = 0; i < 4; ++i) s[i] = static_cast<char>('0' + img_[i]);
        return s;
    }

    static std::optional<Perm4> from_string(const std::string& s) {
        if (s.size() != 4) return std::nullopt;
        Perm4 p;
        for (int i = 0; i < 4; ++i) {
            if (s[i] < '0' || s[i] > '3') return std::nullopt;
            p.img_[i] = static_cast<uint8_t>(s[i] - '0');
        }
        if (!p.is_valid()) return std::nullopt;
        return p;
    }

    static const Perm4& swap23() {
        static const Perm4 p(0, 1, 3, 2);
        return p;
    }

private:
    std::array<uint8_t, 4> img_;
};

}  // namespace foam
