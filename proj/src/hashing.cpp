#include "romfsm/hashing.hpp"

#include <fstream>
#include <vector>

namespace romfsm {

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open " + path);
    Fnv1a h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.bytes(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.value();
}

}  // namespace romfsm
