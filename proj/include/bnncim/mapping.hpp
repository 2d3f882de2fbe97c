#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bnncim/bitvec.hpp"

namespace bnncim {

// M cell rows by N logical cells per row. A TacitMap cell is one 1T1R device;
// a CustBinaryMap logical cell is a 2T2R pair.
struct CrossbarDims {
    std::size_t rows = 0;
    std::size_t cols = 0;

    void validate() const;
    std::string to_string() const { return std::to_string(rows) + "x" + std::to_string(cols); }
    friend bool operator==(const CrossbarDims&, const CrossbarDims&) = default;
};

enum class MappingKind { tacit, custbinary };
std::string to_string(MappingKind kind);

struct Range {
    std::size_t begin = 0;
    std::size_t count = 0;
    std::size_t end() const noexcept { return begin + count; }
    friend bool operator==(const Range&, const Range&) = default;
};

struct TilePlacement {
    std::size_t tile_id = 0;
    std::size_t grid_row = 0;
    std::size_t grid_col = 0;
    MappingKind kind = MappingKind::tacit;
    CrossbarDims dims;
    Range elements;  // slice of each weight vector (the m axis)
    Range vectors;   // weight vectors held (the n axis)
    // TacitMap: the complement of row r sits at row r + offset.
    std::size_t complement_row_offset = 0;

    // TacitMap: dims.cols columns of dims.rows device bits.
    std::vector<BitVector> columns;
    // CustBinaryMap: dims.rows rows of dims.cols logical cells, split into the
    // device holding x and the device holding its complement.
    std::vector<BitVector> row_true;
    std::vector<BitVector> row_comp;

    // Driven rows (TacitMap: slice plus complement) or occupied rows (CustBinaryMap).
    std::size_t rows_used() const noexcept;
    std::size_t cols_used() const noexcept;
    std::size_t devices_used() const noexcept;

    // Flips one stored device; fault injection for validation tests.
    // For CustBinaryMap, `device` 0 is the x device and 1 the complement.
    void flip_device(std::size_t row, std::size_t col, int device = 0);
};

struct MappedLayer {
    MappingKind kind = MappingKind::tacit;
    CrossbarDims dims;
    std::size_t m = 0;  // weight vector length
    std::size_t n = 0;  // weight vector count
    std::size_t row_tiles = 0;
    std::size_t col_tiles = 0;
    std::vector<TilePlacement> tiles;  // row-major over the grid
    // Vector Length term of the popcount-to-dot transform.
    std::size_t post_len = 0;

    const TilePlacement& tile(std::size_t grid_row, std::size_t grid_col) const {
        return tiles.at(grid_row * col_tiles + grid_col);
    }
    TilePlacement& tile(std::size_t grid_row, std::size_t grid_col) {
        return tiles.at(grid_row * col_tiles + grid_col);
    }
    std::size_t devices_used() const noexcept;
};

// Tile ranges over the logical matrix, row-major over the tile grid.
struct TileRanges {
    std::size_t grid_row = 0;
    std::size_t grid_col = 0;
    Range elements;
    Range vectors;
};

struct TilePlan {
    std::size_t row_tiles = 0;
    std::size_t col_tiles = 0;
    std::vector<TileRanges> tiles;
};

// TacitMap: ceil(m / floor(M/2)) x ceil(n / N) tiles.
// CustBinaryMap: ceil(n / M) x ceil(m / N) tiles.
TilePlan tile_plan(MappingKind kind, std::size_t m, std::size_t n, const CrossbarDims& dims);

// Each weight vector goes down a column, its complement right below it.
MappedLayer tacitmap_layout(const BitMatrix& w, const CrossbarDims& dims);
// One drive per row-tile: slice of the input followed by its complement.
std::vector<BitVector> tacitmap_encode_input(const BitVector& in_bits, const MappedLayer& layer);

// Each weight vector along a row of 2T2R cells holding (w, not w).
MappedLayer custbinary_layout(const BitMatrix& w, const CrossbarDims& dims);

// Input lines for one column-tile of a CustBinaryMap layer: cell i sees
// (in_i, not in_i) against its (w_i, not w_i) devices.
struct InterleavedDrive {
    BitVector in;
    BitVector in_comp;

    // Device-level sequence in_0, !in_0, in_1, !in_1, ...
    BitVector interleaved() const;
};
std::vector<InterleavedDrive> custbinary_encode_input(const BitVector& in_bits, const MappedLayer& layer);

MappedLayer map_layer(MappingKind kind, const BitMatrix& w, const CrossbarDims& dims);

// Recovers the logical weight matrix from the tiles. Throws ConfigError if a
// stored complement disagrees with its weight bit.
BitMatrix decode_layout(const MappedLayer& layer);

}  // namespace bnncim
