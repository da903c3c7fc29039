#include "gasdyn/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gasdyn::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// Compact SHA-256, FIPS 180-4.
struct Sha256 {
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    unsigned char block[64];
    std::size_t fill = 0;
    uint64_t total_bytes = 0;

    static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process(const unsigned char* p) {
        static const uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (uint32_t)p[4 * i] << 24 | (uint32_t)p[4 * i + 1] << 16 |
                   (uint32_t)p[4 * i + 2] << 8 | (uint32_t)p[4 * i + 3];
        for (int i = 16; i < 64; ++i) {
            const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6],
                 hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const uint32_t ch = (e & f) ^ (~e & g);
            const uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void append(const unsigned char* data, std::size_t len) {
        while (len > 0) {
            const std::size_t take = std::min(len, 64 - fill);
            std::memcpy(block + fill, data, take);
            fill += take;
            data += take;
            len -= take;
            if (fill == 64) {
                process(block);
                fill = 0;
            }
        }
    }

    void update(const unsigned char* data, std::size_t len) {
        total_bytes += len;
        append(data, len);
    }

    std::string hexdigest() {
        const uint64_t msg_bits = 8ull * total_bytes;
        const unsigned char pad = 0x80;
        const unsigned char zero = 0;
        append(&pad, 1);
        while (fill != 56) append(&zero, 1);
        unsigned char lenb[8];
        for (int i = 0; i < 8; ++i) lenb[i] = (unsigned char)(msg_bits >> (56 - 8 * i));
        append(lenb, 8);
        char out[65];
        for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 64);
    }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    Sha256 s;
    s.update(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
    return s.hexdigest();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

std::string state_to_csv(const ParticleState& state) {
    std::string out = "x,m,v\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        out += format_double(state.positions[i]);
        out += ',';
        out += format_double(state.masses[i] * state.mass_scale);
        out += ',';
        out += format_double(state.velocities[i]);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           const std::string& header, std::size_t cols) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw std::runtime_error("csv: expected header '" + header + "'");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != cols) throw std::runtime_error("csv: wrong column count");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

ParticleState state_from_csv(const std::string& text, double time) {
    const auto rows = parse_csv(text, "x,m,v", 3);
    std::vector<double> x, m, v;
    for (const auto& row : rows) {
        x.push_back(row[0]);
        m.push_back(row[1]);
        v.push_back(row[2]);
    }
    return make_particle_state(std::move(x), std::move(m), std::move(v), time);
}

std::string state_to_json(const ParticleState& state) {
    nlohmann::ordered_json j;
    j["time"] = state.time;
    j["positions"] = state.positions;
    std::vector<double> rescaled(state.size());
    for (std::size_t i = 0; i < state.size(); ++i)
        rescaled[i] = state.masses[i] * state.mass_scale;
    j["masses"] = rescaled;
    j["velocities"] = state.velocities;
    return j.dump(2) + "\n";
}

ParticleState state_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return make_particle_state(j.at("positions").get<std::vector<double>>(),
                               j.at("masses").get<std::vector<double>>(),
                               j.at("velocities").get<std::vector<double>>(),
                               j.at("time").get<double>());
}

AtomicMeasure measure_from_csv(const std::string& text) {
    const auto rows = parse_csv(text, "x,w", 2);
    std::vector<double> x, w;
    for (const auto& row : rows) {
        x.push_back(row[0]);
        w.push_back(row[1]);
    }
    return make_atomic_measure(std::move(x), std::move(w));
}

std::string ledger_to_csv(const Trajectory& traj) {
    std::string out = "k,t,E_before,E_after,velocity_term,bregman_term,multiplier_term\n";
    for (std::size_t k = 0; k < traj.step_count(); ++k) {
        const DissipationLedger& led = traj.steps[k].dissipation;
        out += std::to_string(k);
        out += ',';
        out += format_double(k * traj.tau);
        for (double v : {led.energy_before, led.energy_after, led.velocity_term,
                         led.bregman_term, led.multiplier_term}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string diagnostics_to_csv(const DiagnosticSeries& series) {
    std::string out = "t,E,N,a,f,defect_Q_total,defect_phi_total,virial_residual,M2\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_double(series.times[i]);
        const double virial = series.virial_lhs[i] - series.virial_rhs[i];
        for (double v : {series.E[i], series.N[i], series.a[i], series.f[i],
                         series.defect_Q_total[i], series.defect_phi_total[i], virial,
                         series.M2[i]}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace gasdyn::io
