#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "tuplesmith/primes.hpp"
#include "tuplesmith/store.hpp"

namespace httplib {
class Server;
}

namespace tuplesmith {

struct ApiConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    bool read_only = false;
    std::filesystem::path store_path;
    std::size_t max_body_bytes = std::size_t{64} << 20;  // 64 MiB
};

// HTTP front-end over the record store. Handlers are stateless; every
// response is a pure function of the store contents and the request. All
// writes funnel through the store's single-writer lock.
//
// Routes:
//   GET  /v1/health        -> 200 "ok"
//   GET  /v1/best/{k}      -> record JSON | 404 (unknown k) | 400 (bad k)
//   POST /v1/submit        -> 201 new record | 200 not better | 422 rejected
//   GET  /v1/export        -> TSR1 archive (optional min_k/max_k bounds)
class RecordService {
public:
    RecordService(ApiConfig config, PrimeSource& primes);
    ~RecordService();

    RecordService(const RecordService&) = delete;
    RecordService& operator=(const RecordService&) = delete;

    // Blocking listen on the configured bind/port.
    bool run();

    // Starts a background listener (port 0 picks an ephemeral port) and
    // returns the bound port. Used by tests and available to tooling.
    int start_background();
    void stop();

private:
    void install_routes();

    ApiConfig config_;
    Store store_;
    std::unique_ptr<httplib::Server> server_;
    std::thread worker_;
    int bound_port_ = -1;
};

}  // namespace tuplesmith
