#include "net/protocol.hpp"

#include "core/pnm.hpp"
#include "util/base64.hpp"
#include "util/errors.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace adstest::net {

namespace {

[[noreturn]] void throw_errno(TransportError::Kind kind, const std::string& what) {
    throw TransportError(kind, what + ": " + std::strerror(errno));
}

void poll_or_timeout(int fd, short events, int timeout_ms, const char* what) {
    pollfd p{fd, events, 0};
    int rc = ::poll(&p, 1, timeout_ms);
    if (rc < 0) throw_errno(TransportError::Kind::closed, what);
    if (rc == 0) throw TransportError(TransportError::Kind::timeout, std::string(what) + ": timed out");
}

void write_all(int fd, const std::uint8_t* data, std::size_t len, int timeout_ms) {
    std::size_t off = 0;
    while (off < len) {
        poll_or_timeout(fd, POLLOUT, timeout_ms, "send");
        ssize_t n = ::send(fd, data + off, len - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno(TransportError::Kind::closed, "send");
        }
        off += static_cast<std::size_t>(n);
    }
}

// Returns false on clean EOF before the first byte.
bool read_all(int fd, std::uint8_t* data, std::size_t len, int timeout_ms, bool eof_ok) {
    std::size_t off = 0;
    while (off < len) {
        poll_or_timeout(fd, POLLIN, timeout_ms, "receive");
        ssize_t n = ::recv(fd, data + off, len - off, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno(TransportError::Kind::closed, "receive");
        }
        if (n == 0) {
            if (off == 0 && eof_ok) return false;
            throw TransportError(TransportError::Kind::closed, "connection closed mid-frame");
        }
        off += static_cast<std::size_t>(n);
    }
    return true;
}

} // namespace

std::vector<std::uint8_t> frame_payload(const json& msg) {
    std::string body = msg.dump();
    if (body.size() > kMaxPayload)
        throw TransportError(TransportError::Kind::protocol,
                             "payload exceeds max (" + std::to_string(body.size()) + " bytes)");
    std::vector<std::uint8_t> out(4 + body.size());
    std::uint32_t n = static_cast<std::uint32_t>(body.size());
    out[0] = static_cast<std::uint8_t>(n >> 24);
    out[1] = static_cast<std::uint8_t>(n >> 16);
    out[2] = static_cast<std::uint8_t>(n >> 8);
    out[3] = static_cast<std::uint8_t>(n);
    std::memcpy(out.data() + 4, body.data(), body.size());
    return out;
}

json encode_view(const Image& image) {
    return json{{"width", image.width()},
                {"height", image.height()},
                {"ppm_base64", base64_encode(encode_ppm(image))}};
}

Image decode_view(const json& view) {
    Image img = decode_ppm(base64_decode(view.at("ppm_base64").get<std::string>()));
    if (img.width() != view.at("width").get<int>() || img.height() != view.at("height").get<int>())
        throw TransportError(TransportError::Kind::protocol, "view dims disagree with payload");
    return img;
}

json encode_params(const AugmentParams& params, const PreservedClasses& preserved) {
    json p{{"text_guidance", params.text_guidance},
           {"image_guidance", params.image_guidance},
           {"noise_level", params.noise_level},
           {"corrupt_base_prob", params.corrupt_base_prob},
           {"seed", params.seed}};
    json classes = json::array();
    for (std::uint8_t id : preserved) classes.push_back(id);
    p["preserved_classes"] = classes;
    return p;
}

AugmentParams decode_params(const json& params) {
    AugmentParams p;
    p.text_guidance = params.value("text_guidance", p.text_guidance);
    p.image_guidance = params.value("image_guidance", p.image_guidance);
    p.noise_level = params.value("noise_level", p.noise_level);
    p.corrupt_base_prob = params.value("corrupt_base_prob", p.corrupt_base_prob);
    p.seed = params.value("seed", std::uint64_t{0});
    return p;
}

PreservedClasses decode_preserved(const json& params) {
    PreservedClasses preserved;
    if (params.contains("preserved_classes"))
        for (const auto& id : params["preserved_classes"]) preserved.insert(id.get<std::uint8_t>());
    return preserved;
}

json augment_request(std::uint64_t frame_id, const std::string& strategy_name,
                     const std::string& domain_name, const AugmentParams& params,
                     const PreservedClasses& preserved, const Frame& frame) {
    json views = json::array();
    for (const Image& v : frame.views) views.push_back(encode_view(v));
    json masks = json::array();
    for (const SemanticMask& m : frame.masks) masks.push_back(base64_encode(encode_pgm(m)));
    return json{{"type", "augment_request"}, {"version", kProtocolVersion},
                {"frame_id", frame_id},      {"strategy", strategy_name},
                {"domain", domain_name},     {"params", encode_params(params, preserved)},
                {"views", views},            {"masks", masks}};
}

json augment_response(std::uint64_t frame_id, const AugmentationResult& result) {
    json views = json::array();
    for (const Image& v : result.images) views.push_back(encode_view(v));
    json r{{"type", "augment_response"},
           {"frame_id", frame_id},
           {"views", views},
           {"elapsed_ms", result.elapsed_ms},
           {"seed_used", result.seed_used}};
    if (result.gt_valid) r["gt_valid"] = *result.gt_valid;
    return r;
}

json agent_act_request(std::uint64_t frame_id, const Frame& frame) {
    json views = json::array();
    for (const Image& v : frame.views) views.push_back(encode_view(v));
    return json{{"type", "agent_act"},
                {"version", kProtocolVersion},
                {"frame_id", frame_id},
                {"views", views}};
}

json agent_act_response(std::uint64_t frame_id, const ControlCommand& cmd) {
    return json{{"type", "agent_act_response"},
                {"frame_id", frame_id},
                {"steering", cmd.steering_target},
                {"throttle", cmd.throttle}};
}

json error_response(std::uint64_t frame_id, const std::string& message) {
    return json{{"type", "error"}, {"frame_id", frame_id}, {"message", message}};
}

Frame decode_request_frame(const json& request) {
    Frame frame;
    frame.id = request.at("frame_id").get<std::uint64_t>();
    for (const auto& v : request.at("views")) frame.views.push_back(decode_view(v));
    if (request.contains("masks"))
        for (const auto& m : request["masks"])
            frame.masks.push_back(decode_pgm(base64_decode(m.get<std::string>())));
    return frame;
}

std::pair<std::string, int> split_endpoint(const std::string& endpoint) {
    auto pos = endpoint.rfind(':');
    if (pos == std::string::npos || pos + 1 >= endpoint.size())
        throw InvalidArgument("endpoint must be host:port, got '" + endpoint + "'");
    int port = 0;
    try {
        port = std::stoi(endpoint.substr(pos + 1));
    } catch (const std::exception&) {
        throw InvalidArgument("bad port in endpoint '" + endpoint + "'");
    }
    if (port < 0 || port > 65535) throw InvalidArgument("port out of range in '" + endpoint + "'");
    return {endpoint.substr(0, pos), port};
}

FramedSocket::FramedSocket(FramedSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

FramedSocket& FramedSocket::operator=(FramedSocket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

FramedSocket::~FramedSocket() { close(); }

void FramedSocket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

FramedSocket FramedSocket::connect(const std::string& endpoint, int timeout_ms) {
    auto [host, port] = split_endpoint(endpoint);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw TransportError(TransportError::Kind::connect, "bad address '" + host + "'");

    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_NONBLOCK, 0);
    if (fd < 0) throw_errno(TransportError::Kind::connect, "socket");
    FramedSocket sock(fd);

    int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    if (rc != 0) {
        if (errno != EINPROGRESS) throw_errno(TransportError::Kind::connect, "connect " + endpoint);
        pollfd p{fd, POLLOUT, 0};
        rc = ::poll(&p, 1, timeout_ms);
        if (rc < 0) throw_errno(TransportError::Kind::connect, "connect " + endpoint);
        if (rc == 0)
            throw TransportError(TransportError::Kind::timeout, "connect " + endpoint + ": timed out");
        int err = 0;
        socklen_t len = sizeof(err);
        if (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0)
            throw TransportError(TransportError::Kind::connect,
                                 "connect " + endpoint + ": " + std::strerror(err ? err : errno));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return sock;
}

void FramedSocket::send(const json& msg, int timeout_ms) const {
    auto bytes = frame_payload(msg);
    write_all(fd_, bytes.data(), bytes.size(), timeout_ms);
}

std::optional<json> FramedSocket::receive(int timeout_ms) const {
    std::uint8_t header[4];
    if (!read_all(fd_, header, 4, timeout_ms, /*eof_ok=*/true)) return std::nullopt;
    std::uint32_t n = (std::uint32_t(header[0]) << 24) | (std::uint32_t(header[1]) << 16) |
                      (std::uint32_t(header[2]) << 8) | header[3];
    if (n > kMaxPayload)
        throw TransportError(TransportError::Kind::protocol,
                             "frame length " + std::to_string(n) + " exceeds max payload");
    std::vector<std::uint8_t> body(n);
    read_all(fd_, body.data(), n, timeout_ms, /*eof_ok=*/false);
    try {
        return json::parse(body.begin(), body.end());
    } catch (const json::exception& e) {
        throw TransportError(TransportError::Kind::protocol, std::string("bad JSON payload: ") + e.what());
    }
}

} // namespace adstest::net
