#include "core/pnm.hpp"

#include "util/errors.hpp"

#include <fstream>

namespace adstest {

namespace {

struct HeaderReader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void skip_separators() {
        while (pos < bytes.size()) {
            char c = static_cast<char>(bytes[pos]);
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos;
            } else if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    int read_int() {
        skip_separators();
        if (pos >= bytes.size() || !isdigit(bytes[pos])) throw CodecError("pnm: malformed header");
        long v = 0;
        while (pos < bytes.size() && isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1 << 24) throw CodecError("pnm: header value out of range");
            ++pos;
        }
        return static_cast<int>(v);
    }
};

// Magic, then width/height/maxval separated by whitespace, then exactly one
// whitespace byte before the payload.
std::size_t parse_header(const std::vector<std::uint8_t>& bytes, const char* magic, int& w, int& h) {
    if (bytes.size() < 2 || bytes[0] != static_cast<std::uint8_t>(magic[0]) ||
        bytes[1] != static_cast<std::uint8_t>(magic[1]))
        throw CodecError(std::string("pnm: expected magic ") + magic);
    HeaderReader r{bytes, 2};
    w = r.read_int();
    h = r.read_int();
    int maxval = r.read_int();
    if (w < 1 || h < 1) throw CodecError("pnm: invalid dimensions");
    if (maxval != 255) throw CodecError("pnm: maxval must be 255");
    if (r.pos >= bytes.size()) throw CodecError("pnm: truncated header");
    char sep = static_cast<char>(bytes[r.pos]);
    if (sep != ' ' && sep != '\t' && sep != '\n' && sep != '\r')
        throw CodecError("pnm: missing separator before payload");
    return r.pos + 1;
}

std::string canonical_header(const char* magic, int w, int h) {
    return std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
}

} // namespace

std::vector<std::uint8_t> encode_ppm(const Image& image) {
    std::string header = canonical_header("P6", image.width(), image.height());
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels().begin(), image.pixels().end());
    return out;
}

Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
    int w = 0, h = 0;
    std::size_t payload = parse_header(bytes, "P6", w, h);
    std::size_t need = std::size_t(w) * h * 3;
    if (bytes.size() - payload < need) throw CodecError("ppm: truncated payload");
    Image img(w, h);
    std::copy(bytes.begin() + payload, bytes.begin() + payload + need, img.pixels().begin());
    return img;
}

std::vector<std::uint8_t> encode_pgm(const SemanticMask& mask) {
    std::string header = canonical_header("P5", mask.width(), mask.height());
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), mask.classes().begin(), mask.classes().end());
    return out;
}

SemanticMask decode_pgm(const std::vector<std::uint8_t>& bytes, int n_classes) {
    int w = 0, h = 0;
    std::size_t payload = parse_header(bytes, "P5", w, h);
    std::size_t need = std::size_t(w) * h;
    if (bytes.size() - payload < need) throw CodecError("pgm: truncated payload");
    SemanticMask mask(w, h);
    for (std::size_t i = 0; i < need; ++i) {
        std::uint8_t v = bytes[payload + i];
        if (v >= n_classes)
            throw CodecError("pgm: class index " + std::to_string(v) + " out of range (" +
                             std::to_string(n_classes) + " classes)");
        mask.classes()[i] = v;
    }
    return mask;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write: " + path);
}

Image read_ppm(const std::string& path) { return decode_ppm(read_file(path)); }
void write_ppm(const std::string& path, const Image& image) { write_file(path, encode_ppm(image)); }
SemanticMask read_pgm(const std::string& path, int n_classes) { return decode_pgm(read_file(path), n_classes); }
void write_pgm(const std::string& path, const SemanticMask& mask) { write_file(path, encode_pgm(mask)); }

} // namespace adstest
