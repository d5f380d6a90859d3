#include "gfr/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gfr::io {

namespace {

void put_u32_le(std::ofstream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                                    static_cast<unsigned char>((v >> 8) & 0xff),
                                    static_cast<unsigned char>((v >> 16) & 0xff),
                                    static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32_le(std::ifstream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw std::runtime_error("GFR1: truncated header");
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_f64_le(std::ofstream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64_le(std::ifstream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw std::runtime_error("GFR1: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

void write_gfr1(const std::string& path, std::uint32_t dim, std::uint32_t n,
                const std::vector<const std::vector<double>*>& components) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("GFR1: cannot open " + path + " for writing");
    out.write("GFR1", 4);
    put_u32_le(out, dim);
    put_u32_le(out, n);
    put_u32_le(out, static_cast<std::uint32_t>(components.size()));
    std::size_t expected = 1;
    for (std::uint32_t d = 0; d < dim; ++d) expected *= n;
    for (const auto* c : components) {
        if (c->size() != expected) throw std::runtime_error("GFR1: component size mismatch");
        for (double v : *c) put_f64_le(out, v);
    }
    if (!out) throw std::runtime_error("GFR1: write failed for " + path);
}

void write_gfr1(const std::string& path, const ScalarField& f) {
    write_gfr1(path, static_cast<std::uint32_t>(f.grid.dim),
               static_cast<std::uint32_t>(f.grid.n), {&f.values});
}

void write_gfr1(const std::string& path, const VectorField& f) {
    std::vector<const std::vector<double>*> comps;
    for (const auto& c : f.comp) comps.push_back(&c);
    write_gfr1(path, static_cast<std::uint32_t>(f.grid.dim),
               static_cast<std::uint32_t>(f.grid.n), comps);
}

void write_gfr1(const std::string& path, const MetricField& f) {
    std::vector<const std::vector<double>*> comps;
    for (const auto& c : f.comp) comps.push_back(&c);
    write_gfr1(path, static_cast<std::uint32_t>(f.grid.dim),
               static_cast<std::uint32_t>(f.grid.n), comps);
}

Gfr1Data read_gfr1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("GFR1: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "GFR1", 4) != 0) {
        throw std::runtime_error("GFR1: bad magic in " + path);
    }
    Gfr1Data data;
    data.dim = get_u32_le(in);
    data.n = get_u32_le(in);
    const std::uint32_t ncomp = get_u32_le(in);
    if (data.dim == 0 || data.dim > 3 || data.n == 0 || ncomp == 0 || ncomp > 16) {
        throw std::runtime_error("GFR1: implausible header in " + path);
    }
    std::size_t count = 1;
    for (std::uint32_t d = 0; d < data.dim; ++d) count *= data.n;
    data.components.assign(ncomp, std::vector<double>(count, 0.0));
    for (auto& comp : data.components) {
        for (double& v : comp) v = get_f64_le(in);
    }
    return data;
}

namespace {

// Token reader for the PGM header; '#' starts a comment through end of line.
std::string next_pgm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c) != 0) {
            // skip
        } else {
            break;
        }
        c = in.get();
    }
    while (c != EOF && std::isspace(c) == 0 && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    // leave the terminator in the stream: after maxval it is the single
    // whitespace separating the header from binary raster data
    if (c != EOF) in.unget();
    return tok;
}

int parse_pgm_int(std::istream& in, const char* what) {
    const std::string tok = next_pgm_token(in);
    if (tok.empty()) throw std::runtime_error(std::string("PGM: missing ") + what);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("PGM: malformed ") + what + " '" + tok + "'");
    }
}

} // namespace

PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("PGM: cannot open " + path);
    const std::string magic = next_pgm_token(in);
    if (magic != "P2" && magic != "P5") {
        throw std::runtime_error("PGM: " + path + " is not a P2/P5 grayscale file");
    }
    PgmImage img;
    img.width = parse_pgm_int(in, "width");
    img.height = parse_pgm_int(in, "height");
    const int maxval = parse_pgm_int(in, "maxval");
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535) {
        throw std::runtime_error("PGM: implausible dimensions or maxval in " + path);
    }
    const std::size_t count =
        static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    img.pixels.resize(count);
    if (magic == "P2") {
        for (std::size_t k = 0; k < count; ++k) {
            const int v = parse_pgm_int(in, "pixel");
            if (v < 0 || v > maxval) throw std::runtime_error("PGM: pixel out of range");
            img.pixels[k] = static_cast<double>(v) / maxval;
        }
    } else {
        // single whitespace after maxval, then raw samples
        const int sep = in.get();
        if (sep == EOF || std::isspace(sep) == 0) {
            throw std::runtime_error("PGM: missing separator before raster data");
        }
        const bool wide = maxval > 255;
        std::vector<unsigned char> raw(count * (wide ? 2 : 1));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
            throw std::runtime_error("PGM: truncated raster in " + path);
        }
        for (std::size_t k = 0; k < count; ++k) {
            const int v = wide ? (raw[2 * k] << 8) | raw[2 * k + 1] : raw[k];
            if (v > maxval) throw std::runtime_error("PGM: pixel out of range");
            img.pixels[k] = static_cast<double>(v) / maxval;
        }
    }
    return img;
}

void write_pgm(const std::string& path, const PgmImage& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() !=
            static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height)) {
        throw std::runtime_error("PGM: inconsistent image to write");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("PGM: cannot open " + path + " for writing");
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    std::vector<unsigned char> raw(image.pixels.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double v = std::clamp(image.pixels[k], 0.0, 1.0);
        raw[k] = static_cast<unsigned char>(std::llround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("PGM: write failed for " + path);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("trace: cannot open " + path + " for writing");
    out << "step,t,E,E_match,E_reg,v_norm_A,dt,min_det_jac,inverse_defect,path_length_A\n";
    for (const TraceRecord& r : trace) {
        out << r.step << ',' << format_double(r.t) << ',' << format_double(r.energy_total)
            << ',' << format_double(r.energy_match) << ',' << format_double(r.energy_reg)
            << ',' << format_double(r.velocity_norm_a) << ',' << format_double(r.dt) << ','
            << format_double(r.min_jac_det) << ',' << format_double(r.inverse_defect) << ','
            << format_double(r.path_length_a) << '\n';
    }
    if (!out) throw std::runtime_error("trace: write failed for " + path);
}

void write_so3_trace_csv(const std::string& path,
                         const std::vector<so3::So3TraceRecord>& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("trace: cannot open " + path + " for writing");
    out << "step,t,E,omega_norm_A,path_length_A\n";
    for (const so3::So3TraceRecord& r : trace) {
        out << r.step << ',' << format_double(r.t) << ',' << format_double(r.energy) << ','
            << format_double(r.omega_norm_a) << ',' << format_double(r.path_length_a) << '\n';
    }
    if (!out) throw std::runtime_error("trace: write failed for " + path);
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

void KeyValueFile::set(const std::string& key, double value) { set(key, format_double(value)); }

void KeyValueFile::set(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

const std::string* KeyValueFile::find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

void write_key_value(const std::string& path, const KeyValueFile& kv) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot open " + path + " for writing");
    for (const auto& [k, v] : kv.entries) {
        out << k << '=' << v << '\n';
    }
    if (!out) throw std::runtime_error("manifest: write failed for " + path);
}

KeyValueFile read_key_value(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path);
    KeyValueFile kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        const std::size_t eq = line.find('=', start);
        if (eq == std::string::npos) {
            throw std::runtime_error("config: line without '=' in " + path + ": " + line);
        }
        std::string key = line.substr(start, eq - start);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const std::size_t a = s.find_first_not_of(" \t");
            const std::size_t b = s.find_last_not_of(" \t");
            s = a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(value);
        if (key.empty()) throw std::runtime_error("config: empty key in " + path);
        kv.set(key, value);
    }
    return kv;
}

} // namespace gfr::io
