#pragma once

#include "agents/agents.hpp"
#include "augment/domain.hpp"
#include "net/protocol.hpp"

#include <atomic>
#include <cstdint>
#include <mutex>
#include <thread>
#include <vector>

namespace adstest::net {

struct ServerOptions {
    std::string listen_addr = "127.0.0.1:0"; // port 0 -> ephemeral
    int latency_ms = 0;                      // injected per augment request
    AgentSpec agent;                         // served for agent_act requests
};

// Reference augmentation/agent server. Requests within a connection are
// handled in order; connections are handled concurrently. Augment requests
// run the local strategy mocks, so a remote round trip is bit-identical to
// the in-process call for the same seed.
class Server {
public:
    Server(ServerOptions opts, DomainRegistry domains, Palette palette = Palette::simulator_default());
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    void start(); // throws on bind failure
    void stop();

    int port() const { return port_; }
    std::string endpoint() const;

    struct Stamp {
        std::uint64_t frame_id = 0;
        std::int64_t received_ns = 0;
        std::int64_t replied_ns = 0;
    };
    std::vector<Stamp> stamps() const;

private:
    void accept_loop();
    void serve_connection(int fd);
    json handle(const json& request, std::unique_ptr<Agent>& conn_agent);

    ServerOptions opts_;
    DomainRegistry domains_;
    Palette palette_;

    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    mutable std::mutex mutex_;
    std::vector<std::thread> workers_;
    std::vector<int> client_fds_;
    std::vector<Stamp> stamps_;
};

} // namespace adstest::net
