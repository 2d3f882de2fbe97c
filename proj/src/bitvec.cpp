#include "bnncim/bitvec.hpp"

#include "bnncim/errors.hpp"
#include "bnncim/kernels.hpp"

namespace bnncim {

namespace {
std::size_t words_for(std::size_t bits) { return (bits + BitVector::kWordBits - 1) / BitVector::kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t len, bool value)
    : words_(words_for(len), value ? ~Word{0} : Word{0}), len_(len) {
    clear_tail();
}

BitVector::BitVector(std::initializer_list<int> bits) : words_(words_for(bits.size()), 0), len_(bits.size()) {
    std::size_t i = 0;
    for (int b : bits) set(i++, b != 0);
}

BitVector BitVector::from_bits(std::span<const std::uint8_t> bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
    return v;
}

BitVector BitVector::random(std::size_t len, std::mt19937_64& rng) {
    BitVector v(len);
    for (auto& w : v.words_) w = rng();
    v.clear_tail();
    return v;
}

bool BitVector::at(std::size_t i) const {
    if (i >= len_) throw DimensionError("bit index " + std::to_string(i) + " out of range for length " +
                                        std::to_string(len_));
    return (*this)[i];
}

void BitVector::set(std::size_t i, bool value) {
    if (i >= len_) throw DimensionError("bit index " + std::to_string(i) + " out of range for length " +
                                        std::to_string(len_));
    const Word mask = Word{1} << (i % kWordBits);
    if (value)
        words_[i / kWordBits] |= mask;
    else
        words_[i / kWordBits] &= ~mask;
}

void BitVector::flip(std::size_t i) { set(i, !at(i)); }

std::size_t BitVector::popcount() const noexcept {
    return static_cast<std::size_t>(kernels::popcount(words_));
}

BitVector BitVector::complement() const {
    BitVector out = *this;
    for (auto& w : out.words_) w = ~w;
    out.clear_tail();
    return out;
}

BitVector BitVector::slice(std::size_t begin, std::size_t count) const {
    if (begin + count > len_)
        throw DimensionError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                             ") exceeds length " + std::to_string(len_));
    BitVector out(count);
    if (begin % kWordBits == 0) {
        for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = words_[begin / kWordBits + w];
        out.clear_tail();
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) out.set(i, (*this)[begin + i]);
    return out;
}

void BitVector::append(const BitVector& tail) {
    const std::size_t old = len_;
    len_ += tail.len_;
    words_.resize(words_for(len_), 0);
    if (old % kWordBits == 0) {
        for (std::size_t w = 0; w < tail.words_.size(); ++w) words_[old / kWordBits + w] = tail.words_[w];
        return;
    }
    for (std::size_t i = 0; i < tail.len_; ++i) set(old + i, tail[i]);
}

std::vector<int> BitVector::to_bipolar() const {
    std::vector<int> out(len_);
    for (std::size_t i = 0; i < len_; ++i) out[i] = (*this)[i] ? 1 : -1;
    return out;
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
        if ((*this)[i]) s[i] = '1';
    return s;
}

void BitVector::clear_tail() noexcept {
    if (len_ % kWordBits != 0 && !words_.empty()) words_.back() &= (Word{1} << (len_ % kWordBits)) - 1;
}

BitVector concat(const BitVector& head, const BitVector& tail) {
    BitVector out = head;
    out.append(tail);
    return out;
}

template <typename Op>
BitVector combine(const BitVector& a, const BitVector& b, Op op) {
    if (a.size() != b.size())
        throw DimensionError("bitwise op on lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    BitVector out(a.size());
    for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = op(a.words_[w], b.words_[w]);
    out.clear_tail();
    return out;
}

BitVector operator&(const BitVector& a, const BitVector& b) {
    return combine(a, b, [](BitVector::Word x, BitVector::Word y) { return x & y; });
}
BitVector operator|(const BitVector& a, const BitVector& b) {
    return combine(a, b, [](BitVector::Word x, BitVector::Word y) { return x | y; });
}
BitVector operator^(const BitVector& a, const BitVector& b) {
    return combine(a, b, [](BitVector::Word x, BitVector::Word y) { return x ^ y; });
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), columns_(cols, BitVector(rows)) {}

BitMatrix::BitMatrix(std::vector<BitVector> columns) : columns_(std::move(columns)) {
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t j = 0; j < columns_.size(); ++j)
        if (columns_[j].size() != rows_)
            throw DimensionError("column " + std::to_string(j) + " has length " +
                                 std::to_string(columns_[j].size()) + ", expected " + std::to_string(rows_));
}

BitMatrix BitMatrix::random(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::vector<BitVector> cols_v;
    cols_v.reserve(cols);
    for (std::size_t j = 0; j < cols; ++j) cols_v.push_back(BitVector::random(rows, rng));
    BitMatrix m(std::move(cols_v));
    m.rows_ = rows;
    return m;
}

}  // namespace bnncim
