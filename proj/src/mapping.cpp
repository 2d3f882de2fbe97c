#include "bnncim/mapping.hpp"

#include "bnncim/errors.hpp"

namespace bnncim {

namespace {

std::string sz(std::size_t v) { return std::to_string(v); }
std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void require_nonempty(const BitMatrix& w) {
    if (w.rows() == 0 || w.cols() == 0)
        throw DimensionError("cannot map a " + sz(w.rows()) + "x" + sz(w.cols()) + " weight matrix");
}

}  // namespace

void CrossbarDims::validate() const {
    if (rows < 2 || cols < 1)
        throw CapacityError("crossbar " + to_string() + " is too small (need at least 2 rows and 1 column)");
}

std::string to_string(MappingKind kind) { return kind == MappingKind::tacit ? "tacit" : "custbinary"; }

std::size_t TilePlacement::rows_used() const noexcept {
    return kind == MappingKind::tacit ? 2 * elements.count : vectors.count;
}

std::size_t TilePlacement::cols_used() const noexcept {
    return kind == MappingKind::tacit ? vectors.count : elements.count;
}

std::size_t TilePlacement::devices_used() const noexcept { return 2 * elements.count * vectors.count; }

void TilePlacement::flip_device(std::size_t row, std::size_t col, int device) {
    if (row >= dims.rows || col >= dims.cols)
        throw DimensionError("tile " + sz(tile_id) + ": cell (" + sz(row) + ", " + sz(col) + ") outside " +
                             dims.to_string());
    if (kind == MappingKind::tacit)
        columns[col].flip(row);
    else
        (device == 0 ? row_true : row_comp)[row].flip(col);
}

std::size_t MappedLayer::devices_used() const noexcept {
    std::size_t n_dev = 0;
    for (const auto& t : tiles) n_dev += t.devices_used();
    return n_dev;
}

TilePlan tile_plan(MappingKind kind, std::size_t m, std::size_t n, const CrossbarDims& dims) {
    dims.validate();
    if (m == 0 || n == 0) throw DimensionError("cannot map a " + sz(m) + "x" + sz(n) + " weight matrix");
    // Grid rows split the axis stored along crossbar rows, grid columns the other.
    const bool tacit = kind == MappingKind::tacit;
    const std::size_t row_cap = tacit ? dims.rows / 2 : dims.rows;
    const std::size_t row_len = tacit ? m : n;
    const std::size_t col_len = tacit ? n : m;
    TilePlan plan;
    plan.row_tiles = ceil_div(row_len, row_cap);
    plan.col_tiles = ceil_div(col_len, dims.cols);
    plan.tiles.reserve(plan.row_tiles * plan.col_tiles);
    for (std::size_t gr = 0; gr < plan.row_tiles; ++gr) {
        const Range rows{gr * row_cap, std::min(row_cap, row_len - gr * row_cap)};
        for (std::size_t gc = 0; gc < plan.col_tiles; ++gc) {
            const Range cols{gc * dims.cols, std::min(dims.cols, col_len - gc * dims.cols)};
            plan.tiles.push_back(tacit ? TileRanges{gr, gc, rows, cols} : TileRanges{gr, gc, cols, rows});
        }
    }
    return plan;
}

MappedLayer tacitmap_layout(const BitMatrix& w, const CrossbarDims& dims) {
    dims.validate();
    require_nonempty(w);
    const TilePlan plan = tile_plan(MappingKind::tacit, w.rows(), w.cols(), dims);
    MappedLayer layer;
    layer.kind = MappingKind::tacit;
    layer.dims = dims;
    layer.m = w.rows();
    layer.n = w.cols();
    layer.post_len = w.rows();
    layer.row_tiles = plan.row_tiles;
    layer.col_tiles = plan.col_tiles;
    layer.tiles.reserve(plan.tiles.size());
    for (const auto& r : plan.tiles) {
        TilePlacement t;
        t.tile_id = layer.tiles.size();
        t.grid_row = r.grid_row;
        t.grid_col = r.grid_col;
        t.kind = MappingKind::tacit;
        t.dims = dims;
        t.elements = r.elements;
        t.vectors = r.vectors;
        t.complement_row_offset = t.elements.count;
        t.columns.assign(dims.cols, BitVector(dims.rows));
        for (std::size_t j = 0; j < t.vectors.count; ++j) {
            const BitVector& wv = w.column(t.vectors.begin + j);
            for (std::size_t e = 0; e < t.elements.count; ++e) {
                const bool bit = wv[t.elements.begin + e];
                t.columns[j].set(e, bit);
                t.columns[j].set(e + t.complement_row_offset, !bit);
            }
        }
        layer.tiles.push_back(std::move(t));
    }
    return layer;
}

std::vector<BitVector> tacitmap_encode_input(const BitVector& in_bits, const MappedLayer& layer) {
    if (layer.kind != MappingKind::tacit) throw ConfigError("tacitmap_encode_input on a custbinary layer");
    if (in_bits.size() != layer.m)
        throw DimensionError("input has " + sz(in_bits.size()) + " bits, layer expects " + sz(layer.m));
    std::vector<BitVector> drives;
    drives.reserve(layer.row_tiles);
    for (std::size_t gr = 0; gr < layer.row_tiles; ++gr) {
        const Range& e = layer.tile(gr, 0).elements;
        const BitVector s = in_bits.slice(e.begin, e.count);
        drives.push_back(concat(s, s.complement()));
    }
    return drives;
}

MappedLayer custbinary_layout(const BitMatrix& w, const CrossbarDims& dims) {
    dims.validate();
    require_nonempty(w);
    const TilePlan plan = tile_plan(MappingKind::custbinary, w.rows(), w.cols(), dims);
    MappedLayer layer;
    layer.kind = MappingKind::custbinary;
    layer.dims = dims;
    layer.m = w.rows();
    layer.n = w.cols();
    layer.post_len = w.rows();
    layer.row_tiles = plan.row_tiles;
    layer.col_tiles = plan.col_tiles;
    layer.tiles.reserve(plan.tiles.size());
    for (const auto& r : plan.tiles) {
        TilePlacement t;
        t.tile_id = layer.tiles.size();
        t.grid_row = r.grid_row;
        t.grid_col = r.grid_col;
        t.kind = MappingKind::custbinary;
        t.dims = dims;
        t.elements = r.elements;
        t.vectors = r.vectors;
        t.row_true.assign(dims.rows, BitVector(dims.cols));
        t.row_comp.assign(dims.rows, BitVector(dims.cols));
        for (std::size_t v = 0; v < t.vectors.count; ++v) {
            const BitVector& wv = w.column(t.vectors.begin + v);
            for (std::size_t e = 0; e < t.elements.count; ++e) {
                const bool bit = wv[t.elements.begin + e];
                t.row_true[v].set(e, bit);
                t.row_comp[v].set(e, !bit);
            }
        }
        layer.tiles.push_back(std::move(t));
    }
    return layer;
}

BitVector InterleavedDrive::interleaved() const {
    BitVector out(2 * in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        out.set(2 * i, in[i]);
        out.set(2 * i + 1, in_comp[i]);
    }
    return out;
}

std::vector<InterleavedDrive> custbinary_encode_input(const BitVector& in_bits, const MappedLayer& layer) {
    if (layer.kind != MappingKind::custbinary) throw ConfigError("custbinary_encode_input on a tacit layer");
    if (in_bits.size() != layer.m)
        throw DimensionError("input has " + sz(in_bits.size()) + " bits, layer expects " + sz(layer.m));
    std::vector<InterleavedDrive> drives;
    drives.reserve(layer.col_tiles);
    for (std::size_t gc = 0; gc < layer.col_tiles; ++gc) {
        const Range& e = layer.tile(0, gc).elements;
        BitVector s = in_bits.slice(e.begin, e.count);
        BitVector c = s.complement();
        drives.push_back({std::move(s), std::move(c)});
    }
    return drives;
}

MappedLayer map_layer(MappingKind kind, const BitMatrix& w, const CrossbarDims& dims) {
    return kind == MappingKind::tacit ? tacitmap_layout(w, dims) : custbinary_layout(w, dims);
}

BitMatrix decode_layout(const MappedLayer& layer) {
    BitMatrix w(layer.m, layer.n);
    for (const auto& t : layer.tiles) {
        for (std::size_t v = 0; v < t.vectors.count; ++v) {
            for (std::size_t e = 0; e < t.elements.count; ++e) {
                bool bit = false;
                bool comp = false;
                if (t.kind == MappingKind::tacit) {
                    bit = t.columns[v][e];
                    comp = t.columns[v][e + t.complement_row_offset];
                } else {
                    bit = t.row_true[v][e];
                    comp = t.row_comp[v][e];
                }
                if (bit == comp)
                    throw ConfigError("tile " + sz(t.tile_id) + ": weight " + sz(t.vectors.begin + v) + " element " +
                                      sz(t.elements.begin + e) + " and its complement hold the same bit");
                w.set(t.elements.begin + e, t.vectors.begin + v, bit);
            }
        }
    }
    return w;
}

}  // namespace bnncim
