#pragma once

#include "net/protocol.hpp"

#include <string>

namespace adstest::net {

struct ClientOptions {
    int connect_timeout_ms = 2000;
    int io_timeout_ms = 30000;
};

// Persistent connection to an augmentation/agent server. Strictly
// synchronous: one request in flight at a time.
class Client {
public:
    Client(std::string endpoint, ClientOptions opts = {});

    AugmentationResult augment(const Frame& frame, const std::string& domain_name, Strategy strategy,
                               const AugmentParams& params, const PreservedClasses& preserved);
    ControlCommand agent_act(const Frame& frame);

    const std::string& endpoint() const { return endpoint_; }

private:
    json roundtrip(const json& request);

    std::string endpoint_;
    ClientOptions opts_;
    FramedSocket sock_;
};

// One-shot form: connect, augment one frame, disconnect.
AugmentationResult remote_augment(const std::string& endpoint, const Frame& frame,
                                  const std::string& domain_name, Strategy strategy,
                                  const AugmentParams& params, const PreservedClasses& preserved,
                                  ClientOptions opts = {});

} // namespace adstest::net
