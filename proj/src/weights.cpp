#include "cgl/weights.hpp"

#include <cstdio>
#include <cstring>

namespace cgl {

WeightField sample_weights(const LatticeBox& region, RngStream stream,
                           size_t max_bytes) {
    if (region.width() <= 0 || region.height() <= 0)
        throw ParameterError("sample_weights: empty region");
    const size_t n = (size_t)region.count();
    if (n > max_bytes / sizeof(double))
        throw ResourceError("sample_weights: region of " + std::to_string(n) +
                            " sites exceeds the memory budget");
    WeightField f;
    f.region = region;
    f.w.resize(n);
    size_t idx = 0;
    for (int32_t y = region.lo.y; y <= region.hi.y; ++y) {
        const uint64_t uy = biased(y);
        uint64_t ux = biased(region.lo.x);
        std::array<uint64_t, 4> blk = stream.block(ux >> 2, uy, domain::weights, 0);
        for (int32_t x = region.lo.x; x <= region.hi.x; ++x, ++ux) {
            if ((ux & 3) == 0) blk = stream.block(ux >> 2, uy, domain::weights, 0);
            f.w[idx++] = exp1_from_bits(blk[ux & 3]);
        }
    }
    return f;
}

namespace {

constexpr char kMagic[4] = {'C', 'G', 'W', '1'};

void put_i32le(unsigned char* p, int32_t v) {
    const uint32_t u = (uint32_t)v;
    p[0] = u & 0xff;
    p[1] = (u >> 8) & 0xff;
    p[2] = (u >> 16) & 0xff;
    p[3] = (u >> 24) & 0xff;
}

int32_t get_i32le(const unsigned char* p) {
    return (int32_t)((uint32_t)p[0] | ((uint32_t)p[1] << 8) |
                     ((uint32_t)p[2] << 16) | ((uint32_t)p[3] << 24));
}

void put_f64le(unsigned char* p, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    for (int i = 0; i < 8; ++i) p[i] = (u >> (8 * i)) & 0xff;
}

double get_f64le(const unsigned char* p) {
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= (uint64_t)p[i] << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

} // namespace

void save_weights(const WeightField& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error("save_weights: cannot open " + path);
    unsigned char hdr[20];
    std::memcpy(hdr, kMagic, 4);
    put_i32le(hdr + 4, f.region.lo.x);
    put_i32le(hdr + 8, f.region.lo.y);
    put_i32le(hdr + 12, f.region.hi.x);
    put_i32le(hdr + 16, f.region.hi.y);
    bool ok = std::fwrite(hdr, 1, sizeof hdr, fp) == sizeof hdr;
    std::vector<unsigned char> buf(f.w.size() * 8);
    for (size_t i = 0; i < f.w.size(); ++i) put_f64le(buf.data() + 8 * i, f.w[i]);
    ok = ok && std::fwrite(buf.data(), 1, buf.size(), fp) == buf.size();
    ok = (std::fclose(fp) == 0) && ok;
    if (!ok) throw Error("save_weights: short write to " + path);
}

WeightField load_weights(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw Error("load_weights: cannot open " + path);
    unsigned char hdr[20];
    if (std::fread(hdr, 1, sizeof hdr, fp) != sizeof hdr) {
        std::fclose(fp);
        throw ValidationError("load_weights: truncated header in " + path, 0);
    }
    if (std::memcmp(hdr, kMagic, 4) != 0) {
        std::fclose(fp);
        throw ValidationError("load_weights: bad magic in " + path, 0);
    }
    WeightField f;
    f.region.lo = {get_i32le(hdr + 4), get_i32le(hdr + 8)};
    f.region.hi = {get_i32le(hdr + 12), get_i32le(hdr + 16)};
    if (f.region.width() <= 0 || f.region.height() <= 0) {
        std::fclose(fp);
        throw ValidationError("load_weights: empty box in " + path, 0);
    }
    const size_t n = (size_t)f.region.count();
    std::vector<unsigned char> buf(n * 8);
    const size_t got = std::fread(buf.data(), 1, buf.size(), fp);
    std::fclose(fp);
    if (got != buf.size())
        throw ValidationError("load_weights: payload shorter than box in " + path,
                              (long long)(got / 8));
    f.w.resize(n);
    for (size_t i = 0; i < n; ++i) f.w[i] = get_f64le(buf.data() + 8 * i);
    return f;
}

} // namespace cgl
