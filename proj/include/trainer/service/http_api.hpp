#pragma once

#include <memory>
#include <thread>

#include "trainer/service/live.hpp"
#include "trainer/service/store.hpp"

namespace httplib {
class Server;
}

namespace trainer::service {

/// HTTP/1.1 JSON API over a store and its live sessions.
class Server {
public:
    Server(SessionStore& store, StoreConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread. Throws Error on bind failure.
    void start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();

    [[nodiscard]] int port() const noexcept { return port_; }
    [[nodiscard]] LiveSessions& live() noexcept { return live_; }

private:
    void bind();
    void routes();

    SessionStore& store_;
    StoreConfig config_;
    LiveSessions live_;
    std::unique_ptr<httplib::Server> http_;
    std::thread worker_;
    int port_ = 0;
};

}  // namespace trainer::service
