#include "asni/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "asni/errors.hpp"

namespace asni {

namespace {

constexpr char kMagic[8] = {'A', 'S', 'N', 'I', 'C', 'K', 'P', 'T'};

// Little-endian primitives, independent of host byte order.
void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_str(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

struct Reader {
    const std::string& buf;
    std::size_t at = 0;
    std::string path;

    void need(std::size_t n) const {
        if (at + n > buf.size()) {
            throw DataError(DataError::Kind::truncated,
                            "checkpoint '" + path + "' truncated at byte " + std::to_string(at));
        }
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
        }
        at += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
        }
        at += 8;
        return v;
    }

    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[at++]);
    }

    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s = buf.substr(at, n);
        at += n;
        return s;
    }
};

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, Checkpoint::kVersion);
    put_u64(out, ckpt.seed);
    put_str(out, ckpt.config_echo);

    put_u32(out, static_cast<std::uint32_t>(ckpt.params.size()));
    for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
        const ParamEntry& e = ckpt.params.entry(i);
        put_str(out, e.name);
        out.push_back(e.prunable ? 1 : 0);
        put_u32(out, static_cast<std::uint32_t>(e.layer_index));
        put_u32(out, static_cast<std::uint32_t>(e.tensor.shape.size()));
        for (auto d : e.tensor.shape) put_u64(out, static_cast<std::uint64_t>(d));
        for (float v : e.tensor.data) put_f32(out, v);
    }

    out.push_back(ckpt.mask.has_value() ? 1 : 0);
    if (ckpt.mask) {
        put_u64(out, static_cast<std::uint64_t>(ckpt.mask->size()));
        std::uint8_t acc = 0;
        int fill = 0;
        for (std::int64_t i = 0; i < ckpt.mask->size(); ++i) {
            if (ckpt.mask->bits[static_cast<std::size_t>(i)]) acc |= static_cast<std::uint8_t>(1u << fill);
            if (++fill == 8) {
                out.push_back(static_cast<char>(acc));
                acc = 0;
                fill = 0;
            }
        }
        if (fill) out.push_back(static_cast<char>(acc));
        put_u32(out, static_cast<std::uint32_t>(ckpt.mask->layer_offsets.size()));
        for (auto o : ckpt.mask->layer_offsets) put_u64(out, static_cast<std::uint64_t>(o));
    }

    out.push_back(ckpt.centroids.has_value() ? 1 : 0);
    if (ckpt.centroids) {
        put_u32(out, static_cast<std::uint32_t>(ckpt.centroids->rows.size()));
        for (const auto& r : ckpt.centroids->rows) {
            put_str(out, r.layer);
            put_f64(out, r.c_pos);
            put_f64(out, r.c_neg);
            put_u64(out, static_cast<std::uint64_t>(r.n_pos));
            put_u64(out, static_cast<std::uint64_t>(r.n_neg));
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError(DataError::Kind::io, "cannot write checkpoint '" + path + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError(DataError::Kind::io, "write failed for checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError(DataError::Kind::io, "cannot open checkpoint '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf, 0, path};
    r.need(sizeof(kMagic));
    if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
        throw DataError(DataError::Kind::bad_magic, "'" + path + "' is not an asni checkpoint");
    }
    r.at = sizeof(kMagic);

    const std::uint32_t version = r.u32();
    if (version != Checkpoint::kVersion) {
        throw ConfigError("checkpoint '" + path + "' has version " + std::to_string(version) +
                          ", expected " + std::to_string(Checkpoint::kVersion));
    }

    Checkpoint ckpt;
    ckpt.seed = r.u64();
    ckpt.config_echo = r.str();

    const std::uint32_t n_tensors = r.u32();
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
        ParamEntry e;
        e.name = r.str();
        e.prunable = r.u8() != 0;
        e.layer_index = static_cast<int>(r.u32());
        const std::uint32_t ndim = r.u32();
        std::vector<std::int64_t> shape(ndim);
        for (auto& d : shape) d = static_cast<std::int64_t>(r.u64());
        const std::int64_t numel = shape_numel(shape);
        std::vector<float> data(static_cast<std::size_t>(numel));
        for (auto& v : data) v = r.f32();
        e.tensor = Tensor(std::move(shape), std::move(data));
        ckpt.params.add(std::move(e));
    }

    if (r.u8()) {
        Mask mask;
        const std::uint64_t bits = r.u64();
        mask.bits.resize(bits);
        const std::uint64_t bytes = (bits + 7) / 8;
        r.need(bytes);
        for (std::uint64_t i = 0; i < bits; ++i) {
            const auto byte = static_cast<unsigned char>(buf[r.at + i / 8]);
            mask.bits[i] = (byte >> (i % 8)) & 1u;
        }
        r.at += bytes;
        const std::uint32_t n_offsets = r.u32();
        mask.layer_offsets.resize(n_offsets);
        for (auto& o : mask.layer_offsets) o = static_cast<std::int64_t>(r.u64());
        ckpt.mask = std::move(mask);
    }

    if (r.u8()) {
        CentroidSet set;
        const std::uint32_t rows = r.u32();
        for (std::uint32_t i = 0; i < rows; ++i) {
            CentroidSet::Row row;
            row.layer = r.str();
            row.c_pos = r.f64();
            row.c_neg = r.f64();
            row.n_pos = static_cast<std::int64_t>(r.u64());
            row.n_neg = static_cast<std::int64_t>(r.u64());
            set.rows.push_back(std::move(row));
        }
        ckpt.centroids = std::move(set);
    }

    if (r.at != buf.size()) {
        throw DataError(DataError::Kind::bad_value,
                        "checkpoint '" + path + "' has " + std::to_string(buf.size() - r.at) +
                            " trailing bytes");
    }
    return ckpt;
}

} // namespace asni
