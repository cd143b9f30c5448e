#include "robnet/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace robnet {

namespace {

std::uint32_t crc32_update(std::uint32_t crc, const void* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    const auto* p = static_cast<const unsigned char*>(data);
    crc ^= 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

struct Writer {
    std::ofstream out;
    std::uint32_t crc = 0;

    explicit Writer(const std::string& path) : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
    }
    void bytes(const void* data, std::size_t len) {
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
        crc = crc32_update(crc, data, len);
    }
    void u32(std::uint32_t v) {
        unsigned char buf[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
        bytes(buf, 4);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void floats(std::span<const float> v) {
        static_assert(sizeof(float) == 4);
        bytes(v.data(), v.size() * 4); // little-endian hosts only
    }
};

struct Reader {
    std::vector<char> data;
    std::size_t pos = 0;

    explicit Reader(const std::string& path) {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
        auto size = in.tellg();
        in.seekg(0);
        data.resize(static_cast<std::size_t>(size));
        in.read(data.data(), size);
        if (!in) throw std::runtime_error("cannot read checkpoint file: " + path);
    }
    void bytes(void* dst, std::size_t len) {
        if (pos + len > data.size() - 4) // the trailing CRC is not payload
            throw std::runtime_error("corrupt checkpoint: truncated payload");
        std::memcpy(dst, data.data() + pos, len);
        pos += len;
    }
    std::uint32_t u32() {
        unsigned char buf[4];
        bytes(buf, 4);
        return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
               (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
    }
    std::string str() {
        std::uint32_t len = u32();
        std::string s(len, '\0');
        bytes(s.data(), len);
        return s;
    }
    bool at_payload_end() const { return pos == data.size() - 4; }
};

} // namespace

void save_checkpoint(const std::string& path, SppCnn& model, const TrainMeta& meta) {
    nlohmann::json block;
    block["model"] = nlohmann::json::parse(config_to_json(model.config()));
    block["meta"] = {{"epochs_run", meta.epochs_run},
                     {"final_train_mse", meta.final_train_mse},
                     {"final_val_xi", meta.final_val_xi},
                     {"dataset_fingerprint", meta.dataset_fingerprint}};

    Writer w(path);
    w.bytes("SPPC", 4);
    w.u32(kCheckpointVersion);
    w.str(block.dump());
    for (auto& [name, tensor] : model.named_parameters()) {
        w.str(name);
        w.u32(static_cast<std::uint32_t>(tensor.shape().size()));
        for (std::size_t d : tensor.shape()) w.u32(static_cast<std::uint32_t>(d));
        w.floats(tensor.values());
    }
    std::uint32_t crc = w.crc;
    unsigned char buf[4] = {static_cast<unsigned char>(crc), static_cast<unsigned char>(crc >> 8),
                            static_cast<unsigned char>(crc >> 16),
                            static_cast<unsigned char>(crc >> 24)};
    w.out.write(reinterpret_cast<const char*>(buf), 4);
    if (!w.out) throw std::runtime_error("failed writing checkpoint: " + path);
}

SppCnn load_checkpoint(const std::string& path, TrainMeta* meta_out) {
    Reader r(path);
    if (r.data.size() < 12) throw std::runtime_error("corrupt checkpoint: file too short");

    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, r.data.data() + r.data.size() - 4, 4);
    std::uint32_t actual = crc32_update(0, r.data.data(), r.data.size() - 4);
    if (stored_crc != actual) throw std::runtime_error("corrupt checkpoint: checksum mismatch");

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "SPPC", 4) != 0)
        throw std::runtime_error("not a checkpoint file (bad magic)");
    std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint format version " + std::to_string(version));

    nlohmann::json block = nlohmann::json::parse(r.str());
    ModelConfig config = config_from_json(block.at("model").dump());
    if (meta_out) {
        const auto& m = block.at("meta");
        meta_out->epochs_run = m.at("epochs_run").get<std::uint64_t>();
        meta_out->final_train_mse = m.at("final_train_mse").get<double>();
        meta_out->final_val_xi = m.at("final_val_xi").get<double>();
        meta_out->dataset_fingerprint = m.at("dataset_fingerprint").get<std::string>();
    }

    Rng init_rng(0);
    SppCnn model(config, init_rng);
    for (auto& [name, tensor] : model.named_parameters()) {
        std::string stored_name = r.str();
        if (stored_name != name)
            throw std::runtime_error("corrupt checkpoint: expected parameter '" + name +
                                     "', found '" + stored_name + "'");
        std::uint32_t rank = r.u32();
        if (rank != tensor.shape().size())
            throw std::runtime_error("corrupt checkpoint: rank mismatch for " + name);
        for (std::size_t d : tensor.shape())
            if (r.u32() != d) throw std::runtime_error("corrupt checkpoint: shape mismatch for " + name);
        r.bytes(tensor.values().data(), tensor.size() * 4);
    }
    if (!r.at_payload_end()) throw std::runtime_error("corrupt checkpoint: trailing bytes");
    return model;
}

} // namespace robnet
