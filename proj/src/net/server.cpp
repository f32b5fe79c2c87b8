#include "net/server.hpp"

#include "util/errors.hpp"
#include "util/log.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>

namespace adstest::net {

namespace {

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

Server::Server(ServerOptions opts, DomainRegistry domains, Palette palette)
    : opts_(std::move(opts)), domains_(std::move(domains)), palette_(std::move(palette)) {}

Server::~Server() { stop(); }

std::string Server::endpoint() const {
    auto [host, _] = split_endpoint(opts_.listen_addr);
    return host + ":" + std::to_string(port_);
}

void Server::start() {
    auto [host, port] = split_endpoint(opts_.listen_addr);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw TransportError(TransportError::Kind::connect, "bad listen address '" + host + "'");

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0)
        throw TransportError(TransportError::Kind::connect,
                             std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        std::string err = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw TransportError(TransportError::Kind::connect, "bind " + opts_.listen_addr + ": " + err);
    }
    if (::listen(listen_fd_, 16) != 0) {
        std::string err = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw TransportError(TransportError::Kind::connect, "listen: " + err);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);

    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
    log::info("server listening on " + endpoint());
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        workers.swap(workers_);
    }
    for (auto& t : workers)
        if (t.joinable()) t.join();
}

std::vector<Server::Stamp> Server::stamps() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return stamps_;
}

void Server::accept_loop() {
    while (running_) {
        pollfd p{listen_fd_, POLLIN, 0};
        int rc = ::poll(&p, 1, 200);
        if (!running_) break;
        if (rc <= 0) continue;
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard<std::mutex> lock(mutex_);
        client_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void Server::serve_connection(int fd) {
    FramedSocket sock(fd);
    // Remote agents keep per-connection state (held steering), so each
    // connection gets its own instance.
    std::unique_ptr<Agent> conn_agent;
    try {
        while (running_) {
            auto request = sock.receive(/*timeout_ms=*/3600 * 1000);
            if (!request) break;
            std::int64_t received = now_ns();
            json reply;
            std::uint64_t frame_id = request->value("frame_id", std::uint64_t{0});
            try {
                reply = handle(*request, conn_agent);
            } catch (const std::exception& e) {
                reply = error_response(frame_id, e.what());
            }
            sock.send(reply, /*timeout_ms=*/60 * 1000);
            std::lock_guard<std::mutex> lock(mutex_);
            stamps_.push_back({frame_id, received, now_ns()});
        }
    } catch (const TransportError& e) {
        if (running_) log::debug(std::string("connection ended: ") + e.what());
    } catch (const std::exception& e) {
        log::warn(std::string("connection error: ") + e.what());
    }
    std::lock_guard<std::mutex> lock(mutex_);
    client_fds_.erase(std::remove(client_fds_.begin(), client_fds_.end(), fd), client_fds_.end());
}

json Server::handle(const json& request, std::unique_ptr<Agent>& conn_agent) {
    const std::string type = request.value("type", "");
    const std::uint64_t frame_id = request.value("frame_id", std::uint64_t{0});

    if (type == "augment_request" || type == "agent_act") {
        int version = request.value("version", -1);
        if (version != kProtocolVersion)
            throw TransportError(TransportError::Kind::protocol,
                                 "protocol version mismatch: got " + std::to_string(version) +
                                     ", want " + std::to_string(kProtocolVersion));
    }

    if (type == "augment_request") {
        if (opts_.latency_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(opts_.latency_ms));
        Frame frame = decode_request_frame(request);
        Strategy strategy = strategy_from_name(request.at("strategy").get<std::string>());
        AugmentParams params = decode_params(request.at("params"));
        PreservedClasses preserved = decode_preserved(request.at("params"));

        AugmentationResult result;
        if (strategy == Strategy::none) {
            result.images = frame.views;
            result.seed_used = params.seed;
            result.gt_valid = true;
        } else {
            const DomainSpec& domain = domains_.get(request.at("domain").get<std::string>());
            switch (strategy) {
                case Strategy::instruction:
                    result = augment_instruction(frame, domain, params);
                    break;
                case Strategy::inpaint:
                    result = augment_inpaint(frame, domain, params, preserved);
                    break;
                case Strategy::refine:
                    result = augment_refine(frame, domain, params, preserved);
                    break;
                default:
                    throw TransportError(TransportError::Kind::protocol,
                                         "server cannot run strategy '" +
                                             std::string(strategy_name(strategy)) + "'");
            }
        }
        return augment_response(frame_id, result);
    }

    if (type == "agent_act") {
        Frame frame = decode_request_frame(request);
        if (!conn_agent) conn_agent = make_agent(opts_.agent, palette_);
        return agent_act_response(frame_id, conn_agent->act(frame));
    }

    throw TransportError(TransportError::Kind::protocol, "unknown message type '" + type + "'");
}

} // namespace adstest::net
