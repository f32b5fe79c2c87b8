#pragma once

#include "augment/strategies.hpp"
#include "sim/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace adstest::net {

using nlohmann::json;

constexpr int kProtocolVersion = 1;
constexpr std::size_t kMaxPayload = 64ull * 1024 * 1024; // 64 MiB

// Framing: 4-byte big-endian payload length, then a JSON object.
std::vector<std::uint8_t> frame_payload(const json& msg);

// Message <-> domain-object helpers shared by client and server.
json encode_view(const Image& image);
Image decode_view(const json& view);

json augment_request(std::uint64_t frame_id, const std::string& strategy_name,
                     const std::string& domain_name, const AugmentParams& params,
                     const PreservedClasses& preserved, const Frame& frame);
json augment_response(std::uint64_t frame_id, const AugmentationResult& result);
json agent_act_request(std::uint64_t frame_id, const Frame& frame);
json agent_act_response(std::uint64_t frame_id, const ControlCommand& cmd);
json error_response(std::uint64_t frame_id, const std::string& message);

AugmentParams decode_params(const json& params);
json encode_params(const AugmentParams& params, const PreservedClasses& preserved);
PreservedClasses decode_preserved(const json& params);

// Rebuilds a Frame (views + masks) from an augment request.
Frame decode_request_frame(const json& request);

// Host:port parsing ("127.0.0.1:7001").
std::pair<std::string, int> split_endpoint(const std::string& endpoint);

// Blocking framed-message socket with timeouts on connect/read/write.
class FramedSocket {
public:
    FramedSocket() = default;
    explicit FramedSocket(int fd) : fd_(fd) {}
    FramedSocket(FramedSocket&& other) noexcept;
    FramedSocket& operator=(FramedSocket&& other) noexcept;
    FramedSocket(const FramedSocket&) = delete;
    FramedSocket& operator=(const FramedSocket&) = delete;
    ~FramedSocket();

    static FramedSocket connect(const std::string& endpoint, int timeout_ms);

    void send(const json& msg, int timeout_ms) const;
    // Empty optional on clean peer shutdown at a frame boundary.
    std::optional<json> receive(int timeout_ms) const;

    bool valid() const { return fd_ >= 0; }
    void close();

private:
    int fd_ = -1;
};

} // namespace adstest::net
