#include "qcycle/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace qcycle {

namespace {
constexpr char kMagic[8] = {'Q', 'C', 'Y', 'C', 'S', 'N', 'P', '1'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("save_snapshot: cannot open '" + path + "'");
    os.write(kMagic, sizeof(kMagic));
    put(os, kVersion);
    put(os, snap.config_hash);
    put(os, snap.discretization_hash);
    put(os, snap.tau);
    put(os, static_cast<int32_t>(snap.cycle));
    put(os, snap.state.time);
    const int32_t n = static_cast<int32_t>(snap.state.G.rows());
    put(os, n);
    os.write(reinterpret_cast<const char*>(snap.state.G.data()),
             static_cast<std::streamsize>(sizeof(cxd)) * n * n);
    if (!os) throw ConfigError("save_snapshot: write failed for '" + path + "'");
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("load_snapshot: cannot open '" + path + "'");
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ConfigError("load_snapshot: bad magic in '" + path + "'");
    uint32_t version = 0;
    get(is, version);
    if (version != kVersion)
        throw ConfigError("load_snapshot: unsupported snapshot version");
    Snapshot snap;
    int32_t cycle = 0, n = 0;
    get(is, snap.config_hash);
    get(is, snap.discretization_hash);
    get(is, snap.tau);
    get(is, cycle);
    get(is, snap.state.time);
    get(is, n);
    if (!is || n < 1) throw ConfigError("load_snapshot: corrupt header");
    snap.cycle = cycle;
    snap.state.G.resize(n, n);
    is.read(reinterpret_cast<char*>(snap.state.G.data()),
            static_cast<std::streamsize>(sizeof(cxd)) * n * n);
    if (!is) throw ConfigError("load_snapshot: truncated payload");
    return snap;
}

}  // namespace qcycle
