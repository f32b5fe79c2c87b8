#include "net/client.hpp"

#include "util/errors.hpp"

#include <chrono>

namespace adstest::net {

Client::Client(std::string endpoint, ClientOptions opts)
    : endpoint_(std::move(endpoint)), opts_(opts),
      sock_(FramedSocket::connect(endpoint_, opts.connect_timeout_ms)) {}

json Client::roundtrip(const json& request) {
    sock_.send(request, opts_.io_timeout_ms);
    auto reply = sock_.receive(opts_.io_timeout_ms);
    if (!reply)
        throw TransportError(TransportError::Kind::closed, "server closed connection");
    if (reply->value("type", "") == "error")
        throw TransportError(TransportError::Kind::protocol,
                             "server error: " + reply->value("message", "unknown"));
    return *reply;
}

AugmentationResult Client::augment(const Frame& frame, const std::string& domain_name,
                                   Strategy strategy, const AugmentParams& params,
                                   const PreservedClasses& preserved) {
    auto t0 = std::chrono::steady_clock::now();
    json reply =
        roundtrip(augment_request(frame.id, strategy_name(strategy), domain_name, params, preserved, frame));
    if (reply.value("type", "") != "augment_response" ||
        reply.at("frame_id").get<std::uint64_t>() != frame.id)
        throw TransportError(TransportError::Kind::protocol, "unexpected reply to augment request");

    AugmentationResult result;
    for (const auto& v : reply.at("views")) result.images.push_back(decode_view(v));
    result.seed_used = reply.value("seed_used", params.seed);
    result.server_elapsed_ms = reply.value("elapsed_ms", 0.0);
    if (reply.contains("gt_valid")) result.gt_valid = reply["gt_valid"].get<bool>();
    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ControlCommand Client::agent_act(const Frame& frame) {
    json reply = roundtrip(agent_act_request(frame.id, frame));
    if (reply.value("type", "") != "agent_act_response" ||
        reply.at("frame_id").get<std::uint64_t>() != frame.id)
        throw TransportError(TransportError::Kind::protocol, "unexpected reply to agent request");
    return {reply.at("steering").get<double>(), reply.at("throttle").get<double>()};
}

AugmentationResult remote_augment(const std::string& endpoint, const Frame& frame,
                                  const std::string& domain_name, Strategy strategy,
                                  const AugmentParams& params, const PreservedClasses& preserved,
                                  ClientOptions opts) {
    Client client(endpoint, opts);
    return client.augment(frame, domain_name, strategy, params, preserved);
}

} // namespace adstest::net
