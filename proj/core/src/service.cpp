#include "tablefill/service.hpp"

#include "tablefill/columns.hpp"
#include "tablefill/rows.hpp"
#include "tablefill/search.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <charconv>

namespace tablefill {
namespace {

using json = nlohmann::json;

ApiResponse error(int status, std::string code, std::string message, json details = nullptr) {
    json body = {{"code", std::move(code)}, {"message", std::move(message)}, {"details", std::move(details)}};
    return {status, body.dump()};
}

ApiResponse ok(const json& body) { return {200, body.dump()}; }

struct BadRequest {
    ApiResponse response;
};

std::vector<std::string> string_list(const json& seed, const char* key) {
    auto it = seed.find(key);
    if (it == seed.end() || it->is_null()) return {};
    if (!it->is_array()) throw BadRequest{error(400, "INVALID_REQUEST", std::string("seed.") + key + " must be an array")};
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) {
            throw BadRequest{error(400, "INVALID_REQUEST", std::string("seed.") + key + " must hold strings")};
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::size_t checked_limit(long long value) {
    if (value < 1 || value > static_cast<long long>(Service::kMaxLimit)) {
        throw BadRequest{error(422, "INVALID_LIMIT", "limit must be an integer between 1 and 100", value)};
    }
    return static_cast<std::size_t>(value);
}

std::size_t parse_limit(const std::optional<std::string>& raw) {
    if (!raw) return Service::kDefaultLimit;
    long long value = 0;
    const auto* end = raw->data() + raw->size();
    auto [ptr, ec] = std::from_chars(raw->data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw BadRequest{error(422, "INVALID_LIMIT", "limit must be an integer between 1 and 100", *raw)};
    }
    return checked_limit(value);
}

struct SuggestRequest {
    SeedTable seed;
    std::size_t limit = Service::kDefaultLimit;
};

SuggestRequest parse_suggest(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw BadRequest{error(400, "MALFORMED_JSON", "request body is not valid JSON", e.byte)};
    }
    if (!doc.is_object()) throw BadRequest{error(400, "INVALID_REQUEST", "request body must be a JSON object")};
    auto seed_it = doc.find("seed");
    if (seed_it == doc.end() || !seed_it->is_object()) {
        throw BadRequest{error(400, "INVALID_REQUEST", "request needs a 'seed' object")};
    }
    const auto& seed = *seed_it;
    std::string caption;
    if (auto it = seed.find("caption"); it != seed.end() && !it->is_null()) {
        if (!it->is_string()) throw BadRequest{error(400, "INVALID_REQUEST", "seed.caption must be a string")};
        caption = it->get<std::string>();
    }
    auto entities = string_list(seed, "entities");
    auto labels = string_list(seed, "labels");

    SuggestRequest req;
    if (auto it = doc.find("limit"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer()) {
            throw BadRequest{error(422, "INVALID_LIMIT", "limit must be an integer between 1 and 100", *it)};
        }
        req.limit = checked_limit(it->get<long long>());
    }
    try {
        req.seed = SeedTable(std::move(caption), std::move(entities), std::move(labels));
    } catch (const std::invalid_argument& e) {
        throw BadRequest{error(422, "INVALID_SEED", e.what())};
    }
    return req;
}

void reject_unknown_entities(const SeedTable& seed, const IndexBundle& bundle) {
    json unknown = json::array();
    for (const auto& id : seed.entities()) {
        if (bundle.entity_index_of(id) == kNotFound) unknown.push_back(id);
    }
    if (!unknown.empty()) throw BadRequest{error(422, "UNKNOWN_ENTITY", "seed references unknown entities", unknown)};
}

json suggestions_json(const std::vector<Suggestion>& suggestions, long long took_micros) {
    json list = json::array();
    for (const auto& s : suggestions) {
        list.push_back({{"target", s.target}, {"score", s.score}, {"components", s.components}});
    }
    return {{"suggestions", std::move(list)}, {"tookMicros", took_micros}};
}

template <typename Engine>
long long timed(Engine&& engine) {
    const auto start = std::chrono::steady_clock::now();
    engine();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    return std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count();
}

template <typename Handler>
ApiResponse guarded(Handler&& handler) {
    try {
        return handler();
    } catch (const BadRequest& bad) {
        return bad.response;
    } catch (const SeedError& e) {
        return error(422, "INVALID_SEED", e.what());
    } catch (const std::exception&) {
        return error(500, "INTERNAL", "internal error");
    }
}

}  // namespace

Service::Service(std::shared_ptr<const IndexBundle> bundle, ScoringParams params)
    : bundle_(std::move(bundle)), params_(params) {
    params_.validate();
}

ApiResponse Service::suggest_rows(std::string_view body) const {
    return guarded([&] {
        const auto req = parse_suggest(body);
        if (req.seed.entities().empty()) {
            return error(422, "EMPTY_SEED_ENTITIES", "row population requires at least one seed entity");
        }
        reject_unknown_entities(req.seed, *bundle_);
        std::vector<Suggestion> suggestions;
        const auto took = timed([&] {
            const auto candidates = select_row_candidates(req.seed, *bundle_, params_);
            suggestions = rank_rows(req.seed, candidates, *bundle_, params_, req.limit);
        });
        return ok(suggestions_json(suggestions, took));
    });
}

ApiResponse Service::suggest_columns(std::string_view body) const {
    return guarded([&] {
        const auto req = parse_suggest(body);
        if (req.seed.empty()) return error(422, "EMPTY_SEED", "column population requires a non-empty seed");
        reject_unknown_entities(req.seed, *bundle_);
        std::vector<Suggestion> suggestions;
        const auto took = timed([&] {
            const auto related = find_related_tables(req.seed, *bundle_, params_);
            suggestions = rank_labels(req.seed, related, *bundle_, params_, req.limit);
        });
        return ok(suggestions_json(suggestions, took));
    });
}

ApiResponse Service::search_entities(const std::optional<std::string>& q,
                                     const std::optional<std::string>& limit) const {
    return guarded([&] {
        if (!q || NameMatcher(*q).empty()) return error(400, "EMPTY_QUERY", "query parameter 'q' must not be empty");
        const auto n = parse_limit(limit);
        json list = json::array();
        for (const auto& hit : tablefill::search_entities(*bundle_, *q, n)) {
            list.push_back({{"id", hit.id}, {"label", hit.label}, {"abstractSnippet", hit.snippet}});
        }
        return ok(list);
    });
}

ApiResponse Service::search_labels(const std::optional<std::string>& q,
                                   const std::optional<std::string>& limit) const {
    return guarded([&] {
        if (!q || NameMatcher(*q).empty()) return error(400, "EMPTY_QUERY", "query parameter 'q' must not be empty");
        const auto n = parse_limit(limit);
        json list = json::array();
        for (const auto& hit : tablefill::search_labels(*bundle_, *q, n)) {
            list.push_back({{"label", hit.label}, {"tableCount", hit.table_count}});
        }
        return ok(list);
    });
}

ApiResponse Service::entity(std::string_view id) const {
    return guarded([&] {
        const auto* record = bundle_->find_entity(id);
        if (!record) return error(404, "NOT_FOUND", "unknown entity", std::string(id));
        return ok({{"id", record->id},
                   {"label", record->label},
                   {"abstract", record->abstract},
                   {"categories", record->categories}});
    });
}

ApiResponse Service::health() const {
    return ok({{"status", "ok"}, {"tables", bundle_->table_count()}, {"entities", bundle_->entity_count()}});
}

struct HttpServer::Impl {
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, "application/json; charset=utf-8");
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
}

}  // namespace

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
    auto& s = impl_->server;
    // SO_REUSEADDR only: SO_REUSEPORT would let two servers share a port.
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    s.Post("/v1/suggest/rows", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.suggest_rows(req.body));
    });
    s.Post("/v1/suggest/columns", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.suggest_columns(req.body));
    });
    s.Get("/v1/entities/search", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.search_entities(param(req, "q"), param(req, "limit")));
    });
    s.Get("/v1/labels/search", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.search_labels(param(req, "q"), param(req, "limit")));
    });
    s.Get("/v1/entities/(.+)", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.entity(req.matches[1].str()));
    });
    s.Get("/v1/health", [&service](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });

    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto code = res.status == 404 ? "NOT_FOUND" : res.status == 405 ? "METHOD_NOT_ALLOWED" : "HTTP_ERROR";
        reply(res, error(res.status, code, "no such endpoint"));
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        reply(res, error(500, "INTERNAL", "internal error"));
    });
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::bind(const std::string& host, int port) {
    auto& s = impl_->server;
    if (port == 0) {
        port_ = s.bind_to_any_port(host);
    } else {
        port_ = s.bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) {
        throw ServeError("cannot bind " + host + ":" + std::to_string(port) + " (port " + std::to_string(port) +
                         " in use or not permitted)");
    }
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace tablefill
