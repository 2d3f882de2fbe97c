#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bnncim {

// Packed {0,1} vector. Bit b encodes the bipolar value 2b-1.
// Bits past size() in the last word are always zero; the popcount kernels
// rely on that.
class BitVector {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t len, bool value = false);
    BitVector(std::initializer_list<int> bits);

    static BitVector from_bits(std::span<const std::uint8_t> bits);
    static BitVector ones(std::size_t len) { return BitVector(len, true); }
    static BitVector zeros(std::size_t len) { return BitVector(len, false); }
    static BitVector random(std::size_t len, std::mt19937_64& rng);

    std::size_t size() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }
    std::size_t word_count() const noexcept { return words_.size(); }

    bool operator[](std::size_t i) const noexcept {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
    }
    bool at(std::size_t i) const;
    void set(std::size_t i, bool value);
    void flip(std::size_t i);

    std::span<const Word> words() const noexcept { return words_; }

    std::size_t popcount() const noexcept;
    BitVector complement() const;
    BitVector slice(std::size_t begin, std::size_t count) const;
    void append(const BitVector& tail);

    // Bipolar decoding, one value in {-1,+1} per bit.
    std::vector<int> to_bipolar() const;
    std::string to_string() const;

    friend bool operator==(const BitVector& a, const BitVector& b) = default;

    template <typename Op>
    friend BitVector combine(const BitVector& a, const BitVector& b, Op op);

private:
    void clear_tail() noexcept;

    std::vector<Word> words_;
    std::size_t len_ = 0;
};

BitVector concat(const BitVector& head, const BitVector& tail);

// Elementwise logic; operands must have equal length.
BitVector operator&(const BitVector& a, const BitVector& b);
BitVector operator|(const BitVector& a, const BitVector& b);
BitVector operator^(const BitVector& a, const BitVector& b);

// m x n matrix of bits stored column-major: column j is weight vector j.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);
    explicit BitMatrix(std::vector<BitVector> columns);

    static BitMatrix random(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return columns_.size(); }

    const BitVector& column(std::size_t j) const { return columns_.at(j); }
    BitVector& column(std::size_t j) { return columns_.at(j); }
    bool get(std::size_t row, std::size_t col) const { return columns_.at(col).at(row); }
    void set(std::size_t row, std::size_t col, bool v) { columns_.at(col).set(row, v); }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::vector<BitVector> columns_;
};

}  // namespace bnncim
