#include <doctest.h>

#include <random>

#include "bnncim/bnn.hpp"
#include "bnncim/errors.hpp"
#include "oracles.hpp"

using namespace bnncim;

TEST_CASE("xnor examples") {
    CHECK(xnor(BitVector{1, 0}, BitVector{1, 1}) == BitVector{1, 0});
    std::mt19937_64 rng(1);
    const auto v = BitVector::random(77, rng);
    CHECK(xnor(v, v) == BitVector::ones(77));
    CHECK(xnor(v, v.complement()) == BitVector::zeros(77));
    CHECK_THROWS_AS(xnor(BitVector(3), BitVector(4)), DimensionError);
}

TEST_CASE("xnor_popcount_dot examples") {
    const auto d = xnor_popcount_dot(BitVector{1, 0}, BitVector{1, 1});
    CHECK(d.popcount_raw == 1);
    CHECK(d.value == 0);
    std::mt19937_64 rng(2);
    const auto v = BitVector::random(100, rng);
    CHECK(xnor_popcount_dot(v, v).value == 100);
    CHECK_THROWS_AS(xnor_popcount_dot(BitVector(2), BitVector(3)), DimensionError);
    CHECK_THROWS_AS(xnor_popcount_dot(BitVector(), BitVector()), DimensionError);
}

TEST_CASE("xnor_popcount_dot matches the decode-and-multiply oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = 1 + rng() % 256;
        const auto a = BitVector::random(len, rng);
        const auto b = BitVector::random(len, rng);
        const auto d = xnor_popcount_dot(a, b);
        REQUIRE(d.value == oracle::bipolar_dot(a, b));
        REQUIRE(d.popcount_raw == xnor(a, b).popcount());
        REQUIRE(d.value == 2 * static_cast<std::int64_t>(d.popcount_raw) - static_cast<std::int64_t>(len));
        // Parity and range.
        REQUIRE(((d.value - static_cast<std::int64_t>(len)) % 2) == 0);
        REQUIRE(std::llabs(d.value) <= static_cast<long long>(len));
        // Complement symmetry.
        REQUIRE(xnor_popcount_dot(a, b.complement()).value == -d.value);
    }
}

TEST_CASE("popcount identity is exhaustive for short vectors") {
    for (std::size_t len = 1; len <= 8; ++len) {
        for (std::uint32_t a = 0; a < (1U << len); ++a) {
            for (std::uint32_t b = 0; b < (1U << len); ++b) {
                BitVector va(len), vb(len);
                std::vector<int> da(len), db(len);
                for (std::size_t i = 0; i < len; ++i) {
                    da[i] = (a >> i) & 1;
                    db[i] = (b >> i) & 1;
                    va.set(i, da[i]);
                    vb.set(i, db[i]);
                }
                REQUIRE(xnor_popcount_dot(va, vb).value == oracle::bipolar_dot(da, db));
            }
        }
    }
}

TEST_CASE("binarize maps ties to 1") {
    const std::vector<double> x{0.5, -0.5};
    CHECK(binarize(x, 0.0) == BitVector{1, 0});
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(binarize(zeros, 0.0) == BitVector{1, 1});
    const IntVector ints{-3, 2, 2};
    CHECK(binarize(ints, std::int64_t{2}) == BitVector{0, 1, 1});
    const std::vector<std::int64_t> per{-4, 3, 0};
    CHECK(binarize(ints, std::span<const std::int64_t>(per)) == BitVector{1, 0, 1});
    CHECK_THROWS_AS(binarize(ints, std::span<const std::int64_t>(per.data(), 2)), DimensionError);
}

TEST_CASE("binarize agrees with sign(x), sign(0)=+1") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> x(500);
    for (auto& v : x) v = (rng() % 10 == 0) ? 0.0 : dist(rng);
    const auto bits = binarize(x, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int sign = x[i] >= 0.0 ? 1 : -1;
        REQUIRE((bits.at(i) ? 1 : -1) == sign);
    }
}

TEST_CASE("im2col examples") {
    SUBCASE("1x1 kernel reorders pixels") {
        ConvGeometry g{2, 2, 3, 1, 1, 1, 1, 0};
        BitVector in{1, 0, 1, 1, 1, 0, /* ch1 */ 0, 0, 1, 1, 0, 1};
        const auto r = im2col_lower(g, in);
        REQUIRE(r.patches.cols() == 6);
        REQUIRE(r.patches.rows() == 2);
        for (std::size_t p = 0; p < 6; ++p) {
            CHECK(r.patches.get(0, p) == in.at(p));
            CHECK(r.patches.get(1, p) == in.at(6 + p));
        }
    }
    SUBCASE("3x3 kernel on a 3x3 input is a single window") {
        ConvGeometry g{1, 3, 3, 1, 3, 3, 1, 0};
        BitVector in{1, 0, 1, 1, 1, 0, 0, 0, 1};
        const auto r = im2col_lower(g, in);
        CHECK(r.patches.cols() == 1);
        CHECK(r.patches.column(0) == in);
        CHECK(r.out_h == 1);
        CHECK(r.out_w == 1);
    }
    SUBCASE("geometry mismatch") {
        ConvGeometry g{1, 3, 3, 1, 3, 3, 1, 0};
        CHECK_THROWS_AS(im2col_lower(g, BitVector(8)), DimensionError);
        ConvGeometry too_big{1, 2, 2, 1, 3, 3, 1, 0};
        CHECK_THROWS_AS(im2col_lower(too_big, BitVector(4)), DimensionError);
    }
}

TEST_CASE("im2col plus dot equals direct convolution for geometries up to 8") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        ConvGeometry g;
        g.in_ch = 1 + rng() % 3;
        g.in_h = 1 + rng() % 8;
        g.in_w = 1 + rng() % 8;
        g.out_ch = 1 + rng() % 4;
        g.pad = rng() % 2;
        g.kh = 1 + rng() % std::min<std::size_t>(g.in_h + 2 * g.pad, 4);
        g.kw = 1 + rng() % std::min<std::size_t>(g.in_w + 2 * g.pad, 4);
        g.stride = 1 + rng() % 2;
        CAPTURE(trial);
        const auto w = BitMatrix::random(g.patch_len(), g.out_ch, rng);
        const auto in = BitVector::random(g.input_size(), rng);
        const auto expected = oracle::sliding_window_conv(g, in, w);
        const auto layer = BnnLayer::binary_conv(g, w);
        const auto dots = reference_binary_dots(layer, in);
        REQUIRE(dots.size() == expected.size());
        for (std::size_t p = 0; p < dots.size(); ++p)
            for (std::size_t o = 0; o < g.out_ch; ++o) REQUIRE(dots[p][o].value == expected[p][o]);
    }
}

TEST_CASE("reference_layer_forward dense examples") {
    std::mt19937_64 rng(6);
    const auto in = BitVector::random(40, rng);
    const auto same = BnnLayer::binary_dense(BitMatrix(std::vector<BitVector>{in}));
    CHECK(std::get<BitVector>(reference_layer_forward(same, in)) == BitVector{1});
    const auto opposite = BnnLayer::binary_dense(BitMatrix(std::vector<BitVector>{in.complement()}));
    CHECK(std::get<BitVector>(reference_layer_forward(opposite, in)) == BitVector{0});
    CHECK_THROWS_AS(reference_layer_forward(same, LayerValue{BitVector(39)}), DimensionError);
}

TEST_CASE("reference_layer_forward random dense matches bipolar matvec plus threshold") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng() % 90, n = 1 + rng() % 40;
        const auto w = BitMatrix::random(m, n, rng);
        std::vector<std::int64_t> t(n);
        for (auto& x : t) x = static_cast<std::int64_t>(rng() % 9) - 4;
        const auto layer = BnnLayer::binary_dense(w, t);
        const auto in = BitVector::random(m, rng);
        const auto out = std::get<BitVector>(reference_layer_forward(layer, in));
        const auto dots = oracle::dense_dots(w, in);
        for (std::size_t j = 0; j < n; ++j) REQUIRE(out.at(j) == (dots[j] >= t[j]));
    }
}

TEST_CASE("reference_infer") {
    SUBCASE("single full identity layer returns the input") {
        BnnNetwork net;
        net.input_shape = {3};
        net.class_count = 3;
        net.layers.push_back(BnnLayer::full_dense(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
        const auto r = reference_infer(net, IntVector{4, -2, 7});
        CHECK(r.scores == IntVector{4, -2, 7});
        CHECK(r.predicted == 2);
    }
    SUBCASE("ties go to the lowest index") {
        BnnNetwork net;
        net.input_shape = {2};
        net.class_count = 3;
        net.layers.push_back(BnnLayer::full_dense(2, 3, {1, 1, 1, 1, 1, 1}));
        const auto r = reference_infer(net, IntVector{2, 3});
        CHECK(r.scores == IntVector{5, 5, 5});
        CHECK(r.predicted == 0);
    }
    SUBCASE("hand-computed two-layer net") {
        // Layer 0 (3 -> 4), x = [2, -1, 3]:
        //   n0 = 2, n1 = -1 + 3 = 2, n2 = -2 + 1 = -1, n3 = -3
        //   thresholds [0, 3, -1, 0] -> bits [1, 0, 1, 0] -> bipolar [1, -1, 1, -1]
        // Layer 1 (4 -> 2): c0 = 1 - 1 + 1 - 1 = 0, c1 = 1 + 1 = 2 -> class 1
        BnnNetwork net;
        net.input_shape = {3};
        net.class_count = 2;
        net.layers.push_back(BnnLayer::full_dense(3, 4, {1, 0, 0, 0, 1, 1, -1, -1, 0, 0, 0, -1}, {0, 3, -1, 0}));
        net.layers.push_back(BnnLayer::full_dense(4, 2, {1, 1, 1, 1, 1, -1, 0, 0}));
        const auto trace = reference_trace(net, IntVector{2, -1, 3});
        CHECK(std::get<BitVector>(trace[0].output) == BitVector{1, 0, 1, 0});
        const auto r = reference_infer(net, IntVector{2, -1, 3});
        CHECK(r.scores == IntVector{0, 2});
        CHECK(r.predicted == 1);
    }
    SUBCASE("input shape mismatch") {
        BnnNetwork net;
        net.input_shape = {2};
        net.class_count = 1;
        net.layers.push_back(BnnLayer::full_dense(2, 1, {1, 1}));
        CHECK_THROWS_AS(reference_infer(net, IntVector{1, 2, 3}), DimensionError);
    }
}

TEST_CASE("network validation enforces full boundary layers and composing shapes") {
    std::mt19937_64 rng(8);
    BnnNetwork net;
    net.input_shape = {4};
    net.class_count = 2;
    net.layers.push_back(BnnLayer::full_dense(4, 6, std::vector<std::int32_t>(24, 1)));
    net.layers.push_back(BnnLayer::binary_dense(BitMatrix::random(6, 5, rng)));
    net.layers.push_back(BnnLayer::full_dense(5, 2, std::vector<std::int32_t>(10, 1)));
    CHECK_NOTHROW(net.validate());

    auto bad_boundary = net;
    bad_boundary.layers.back() = BnnLayer::binary_dense(BitMatrix::random(5, 2, rng));
    CHECK_THROWS_AS(bad_boundary.validate(), DimensionError);

    auto bad_shape = net;
    bad_shape.layers[1] = BnnLayer::binary_dense(BitMatrix::random(7, 5, rng));
    CHECK_THROWS_AS(bad_shape.validate(), DimensionError);

    auto bad_classes = net;
    bad_classes.class_count = 3;
    CHECK_THROWS_AS(bad_classes.validate(), DimensionError);

    CHECK_THROWS_AS(BnnLayer::full_dense(2, 2, {1, 2, 3}), DimensionError);
    ConvGeometry g{2, 4, 4, 3, 3, 3, 1, 1};
    CHECK_THROWS_AS(BnnLayer::binary_conv(g, BitMatrix::random(17, 3, rng)), DimensionError);
}
