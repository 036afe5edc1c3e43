#include "rnsa/checkpoint.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "rnsa/errors.hpp"

namespace rnsa {

std::uint32_t crc32(const unsigned char* data, std::size_t len, std::uint32_t seed) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

namespace {

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& b, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64(b, v);
}

struct Reader {
    const unsigned char* p;
    std::size_t left;
    void need(std::size_t n) {
        if (left < n) throw CheckpointError(CheckpointError::Kind::crc, "checkpoint truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        p += 4;
        left -= 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        p += 8;
        left -= 8;
        return v;
    }
    double f64() {
        const std::uint64_t v = u64();
        double x;
        std::memcpy(&x, &v, 8);
        return x;
    }
    unsigned char u8() {
        need(1);
        const unsigned char v = *p;
        ++p;
        --left;
        return v;
    }
};

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

CheckpointHeader parse_header(Reader& r, std::size_t* header_bytes) {
    const unsigned char* start = r.p;
    r.need(4);
    if (std::memcmp(r.p, "RNSA", 4) != 0)
        throw CheckpointError(CheckpointError::Kind::magic, "bad checkpoint magic");
    r.p += 4;
    r.left -= 4;
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        std::ostringstream os;
        os << "unsupported checkpoint version " << version;
        throw CheckpointError(CheckpointError::Kind::version, os.str());
    }
    const unsigned char endian = r.u8();
    if (endian != 1)
        throw CheckpointError(CheckpointError::Kind::magic, "unknown endianness tag");
    for (int i = 0; i < 3; ++i) r.u8();
    CheckpointHeader h;
    for (int i = 0; i < 3; ++i) h.n[i] = static_cast<int>(r.u32());
    for (int i = 0; i < 3; ++i) h.a[i] = r.f64();
    h.nu = r.f64();
    h.alpha = r.f64();
    h.f = r.f64();
    h.t = r.f64();
    const std::size_t covered = static_cast<std::size_t>(r.p - start);
    const std::uint32_t stored = r.u32();
    if (crc32(start, covered) != stored)
        throw CheckpointError(CheckpointError::Kind::crc, "header CRC mismatch");
    if (header_bytes) *header_bytes = covered + 4;
    return h;
}

} // namespace

void write_checkpoint(const std::string& path, const SimState& s, const SimParams& p) {
    const Lattice& lat = *s.v.lat;
    std::vector<unsigned char> bytes;
    bytes.reserve(64 + lat.modes().size() * 48 + 16);
    bytes.insert(bytes.end(), {'R', 'N', 'S', 'A'});
    put_u32(bytes, kCheckpointVersion);
    bytes.push_back(1);
    bytes.insert(bytes.end(), {0, 0, 0});
    for (int i = 0; i < 3; ++i) put_u32(bytes, static_cast<std::uint32_t>(lat.n[i]));
    for (int i = 0; i < 3; ++i) put_f64(bytes, lat.a[i]);
    put_f64(bytes, p.nu);
    put_f64(bytes, p.alpha.alpha);
    put_f64(bytes, p.coriolis.f);
    put_f64(bytes, s.t);
    put_u32(bytes, crc32(bytes.data(), bytes.size()));

    const std::size_t payload_start = bytes.size();   // CRC covers the count too
    put_u64(bytes, lat.modes().size());
    for (const Mode& m : lat.modes())
        for (int c = 0; c < 3; ++c) {
            put_f64(bytes, s.v.c[c][m.idx].real());
            put_f64(bytes, s.v.c[c][m.idx].imag());
        }
    put_u32(bytes, crc32(bytes.data() + payload_start, bytes.size() - payload_start));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(CheckpointError::Kind::io, "short write to " + path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
    const auto bytes = slurp(path);
    Reader r{bytes.data(), bytes.size()};
    return parse_header(r, nullptr);
}

SimState read_checkpoint(const std::string& path, const LatticePtr& lat,
                         const SimParams& expected) {
    const auto bytes = slurp(path);
    Reader r{bytes.data(), bytes.size()};
    const CheckpointHeader h = parse_header(r, nullptr);

    for (int i = 0; i < 3; ++i)
        if (h.n[i] != lat->n[i] || h.a[i] != lat->a[i])
            throw CheckpointError(CheckpointError::Kind::shape,
                                  "checkpoint lattice does not match the configured lattice");
    auto close = [](double x, double y) {
        return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    if (!close(h.nu, expected.nu) || !close(h.alpha, expected.alpha.alpha) ||
        !close(h.f, expected.coriolis.f))
        throw CheckpointError(CheckpointError::Kind::shape,
                              "checkpoint parameters disagree with the configuration");

    const unsigned char* payload_start = r.p;
    const std::uint64_t count = r.u64();
    if (count != lat->modes().size())
        throw CheckpointError(CheckpointError::Kind::shape,
                              "checkpoint mode count does not match the lattice truncation");
    SimState s;
    s.v = SpectralField(lat);
    s.t = h.t;
    for (const Mode& m : lat->modes())
        for (int c = 0; c < 3; ++c) {
            const double re = r.f64();
            const double im = r.f64();
            s.v.c[c][m.idx] = cplx(re, im);
        }
    const std::size_t payload_len = static_cast<std::size_t>(r.p - payload_start);
    const std::uint32_t stored = r.u32();
    if (crc32(payload_start, payload_len) != stored)
        throw CheckpointError(CheckpointError::Kind::crc, "payload CRC mismatch");
    return s;
}

} // namespace rnsa
