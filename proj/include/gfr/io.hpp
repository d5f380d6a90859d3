#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gfr/fields.hpp"
#include "gfr/flow.hpp"
#include "gfr/so3.hpp"

namespace gfr::io {

/// "GFR1" field container: magic 'G' 'F' 'R' '1', then little-endian u32
/// dim, u32 nodes per axis, u32 component count, then component-major
/// row-major float64 little-endian payload.
struct Gfr1Data {
    std::uint32_t dim = 0;
    std::uint32_t n = 0;
    std::vector<std::vector<double>> components;
};

void write_gfr1(const std::string& path, std::uint32_t dim, std::uint32_t n,
                const std::vector<const std::vector<double>*>& components);
void write_gfr1(const std::string& path, const ScalarField& f);
void write_gfr1(const std::string& path, const VectorField& f);
void write_gfr1(const std::string& path, const MetricField& f);
Gfr1Data read_gfr1(const std::string& path);

/// Grayscale image with values normalized to [0, 1]; row-major, row 0 on top.
struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;
};

/// Reads P2 (ASCII) and P5 (binary, 1 or 2 bytes per sample). Throws
/// std::runtime_error with a diagnostic on malformed input.
PgmImage read_pgm(const std::string& path);

/// Writes binary P5 with maxval 255.
void write_pgm(const std::string& path, const PgmImage& image);

/// Exact header "step,t,E,E_match,E_reg,v_norm_A,dt,min_det_jac,inverse_defect,path_length_A";
/// doubles printed with "%.17g" so identical runs produce identical bytes.
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace);

void write_so3_trace_csv(const std::string& path,
                         const std::vector<so3::So3TraceRecord>& trace);

/// key=value lines, one per entry, written in insertion order.
struct KeyValueFile {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    const std::string* find(const std::string& key) const;
};

void write_key_value(const std::string& path, const KeyValueFile& kv);

/// Parses key=value lines; blank lines and lines starting with '#' are
/// skipped. Later duplicates win.
KeyValueFile read_key_value(const std::string& path);

std::string format_double(double v); // "%.17g"

} // namespace gfr::io
