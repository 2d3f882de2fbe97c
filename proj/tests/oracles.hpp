#pragma once

// Independent oracles for the tests. They work on plain decoded integers and
// never touch the packed kernels.

#include <cstdint>
#include <random>
#include <vector>

#include "bnncim/bitvec.hpp"
#include "bnncim/bnn.hpp"

namespace oracle {

inline std::vector<int> bits_of(const bnncim::BitVector& v) {
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v.at(i) ? 1 : 0;
    return out;
}

// Sum over (2a-1)(2b-1).
inline std::int64_t bipolar_dot(const std::vector<int>& a, const std::vector<int>& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (2 * a[i] - 1) * (2 * b[i] - 1);
    return s;
}

inline std::int64_t bipolar_dot(const bnncim::BitVector& a, const bnncim::BitVector& b) {
    return bipolar_dot(bits_of(a), bits_of(b));
}

// Column-MAC over the concatenated input/complement drive against the
// weight/complement column: sum a*w + sum (1-a)(1-w).
inline std::int64_t column_mac(const std::vector<int>& a, const std::vector<int>& w) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i] + (1 - a[i]) * (1 - w[i]);
    return s;
}

// Direct sliding-window binary convolution in the bipolar domain; padding
// positions read bit 0 (bipolar -1). Output [pixel][out_ch].
inline std::vector<std::vector<std::int64_t>> sliding_window_conv(const bnncim::ConvGeometry& g,
                                                                  const bnncim::BitVector& input,
                                                                  const bnncim::BitMatrix& w) {
    const auto in = bits_of(input);
    const std::size_t oh = (g.in_h + 2 * g.pad - g.kh) / g.stride + 1;
    const std::size_t ow = (g.in_w + 2 * g.pad - g.kw) / g.stride + 1;
    std::vector<std::vector<std::int64_t>> out(oh * ow, std::vector<std::int64_t>(g.out_ch, 0));
    for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox)
            for (std::size_t o = 0; o < g.out_ch; ++o) {
                std::int64_t acc = 0;
                for (std::size_t c = 0; c < g.in_ch; ++c)
                    for (std::size_t ky = 0; ky < g.kh; ++ky)
                        for (std::size_t kx = 0; kx < g.kw; ++kx) {
                            const long y = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
                            const long x = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
                            int bit = 0;
                            if (y >= 0 && x >= 0 && y < static_cast<long>(g.in_h) && x < static_cast<long>(g.in_w))
                                bit = in[(c * g.in_h + static_cast<std::size_t>(y)) * g.in_w + static_cast<std::size_t>(x)];
                            const int wb = w.get((c * g.kh + ky) * g.kw + kx, o) ? 1 : 0;
                            acc += (2 * bit - 1) * (2 * wb - 1);
                        }
                out[oy * ow + ox][o] = acc;
            }
    return out;
}

// Decode-and-multiply dense layer: dots[j].
inline std::vector<std::int64_t> dense_dots(const bnncim::BitMatrix& w, const bnncim::BitVector& in) {
    std::vector<std::int64_t> out(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) out[j] = bipolar_dot(in, w.column(j));
    return out;
}

inline std::uint64_t naive_column_sum(const bnncim::BitVector& drive, const bnncim::BitVector& column) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < drive.size(); ++i) s += (drive.at(i) && column.at(i)) ? 1 : 0;
    return s;
}

}  // namespace oracle
