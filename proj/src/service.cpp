#include "tuplesmith/service.hpp"

#include <charconv>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace tuplesmith {

namespace {

bool parse_positive_u64(const std::string& s, std::uint64_t& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && out >= 1;
}

std::string rejection_body(const IngestOutcome& outcome) {
    std::ostringstream os;
    os << "verdict=inadmissible\n";
    if (outcome.rejection && outcome.rejection->obstruction) {
        os << "obstruction=" << *outcome.rejection->obstruction << "\n";
        os << "covered=";
        for (std::size_t i = 0; i < outcome.obstruction_cover.size(); ++i) {
            if (i) os << ',';
            os << outcome.obstruction_cover[i];
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace

RecordService::RecordService(ApiConfig config, PrimeSource& primes)
    : config_(std::move(config)),
      store_(config_.store_path, primes),
      server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

RecordService::~RecordService() { stop(); }

void RecordService::install_routes() {
    server_->set_payload_max_length(config_.max_body_bytes);

    server_->Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    server_->Get(R"(/v1/best/([^/]+))", [this](const httplib::Request& req,
                                               httplib::Response& res) {
        std::uint64_t k = 0;
        if (!parse_positive_u64(req.matches[1], k)) {
            res.status = 400;
            res.set_content("k must be a positive integer\n", "text/plain");
            return;
        }
        const auto entry = store_.best(k);
        if (!entry) {
            res.status = 404;
            res.set_content("no record for k=" + std::to_string(k) + "\n", "text/plain");
            return;
        }
        nlohmann::json doc;
        doc["k"] = entry->k;
        doc["diameter"] = entry->diameter;
        doc["checksum"] = entry->checksum;
        doc["provenance"] = entry->provenance;
        doc["verified_at"] = entry->verified_at;
        res.set_content(doc.dump() + "\n", "application/json");
    });

    server_->Post("/v1/submit", [this](const httplib::Request& req, httplib::Response& res) {
        if (config_.read_only) {
            res.status = 403;
            res.set_content("store is read-only\n", "text/plain");
            return;
        }
        const std::string provenance = req.get_header_value("X-Provenance", "http-submit");
        IngestOutcome outcome;
        try {
            outcome = store_.ingest(req.body, provenance);
        } catch (const ParseError& e) {
            res.status = 400;
            res.set_content(std::string("parse error: ") + e.what() + "\n", "text/plain");
            return;
        } catch (const ValidationError& e) {
            res.status = 400;
            res.set_content(std::string("invalid tuple: ") + e.what() + "\n", "text/plain");
            return;
        }
        switch (outcome.status) {
            case IngestStatus::accepted_new_record: {
                res.status = 201;
                std::ostringstream os;
                os << "status=new-record\nk=" << outcome.k << "\ndiameter=" << outcome.diameter
                   << "\n";
                res.set_content(os.str(), "text/plain");
                break;
            }
            case IngestStatus::accepted_not_better: {
                res.status = 200;
                std::ostringstream os;
                os << "status=not-better\nk=" << outcome.k << "\ndiameter=" << outcome.diameter
                   << "\nbest=" << *outcome.incumbent_diameter << "\n";
                res.set_content(os.str(), "text/plain");
                break;
            }
            case IngestStatus::rejected: {
                res.status = 422;
                res.set_content(rejection_body(outcome), "text/plain");
                break;
            }
        }
    });

    server_->Get("/v1/export", [this](const httplib::Request& req, httplib::Response& res) {
        std::uint64_t min_k = 1;
        std::uint64_t max_k = UINT64_MAX;
        if (req.has_param("min_k") && !parse_positive_u64(req.get_param_value("min_k"), min_k)) {
            res.status = 400;
            res.set_content("min_k must be a positive integer\n", "text/plain");
            return;
        }
        if (req.has_param("max_k") && !parse_positive_u64(req.get_param_value("max_k"), max_k)) {
            res.status = 400;
            res.set_content("max_k must be a positive integer\n", "text/plain");
            return;
        }
        if (min_k > max_k) {
            res.status = 400;
            res.set_content("min_k exceeds max_k\n", "text/plain");
            return;
        }
        res.set_content(store_.export_archive(min_k, max_k), "application/octet-stream");
    });
}

bool RecordService::run() { return server_->listen(config_.bind, config_.port); }

int RecordService::start_background() {
    if (config_.port == 0) {
        bound_port_ = server_->bind_to_any_port(config_.bind);
    } else {
        bound_port_ = server_->bind_to_port(config_.bind, config_.port) ? config_.port : -1;
    }
    if (bound_port_ < 0) return -1;
    worker_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound_port_;
}

void RecordService::stop() {
    if (server_) server_->stop();
    if (worker_.joinable()) worker_.join();
}

}  // namespace tuplesmith
