#pragma once

#include "tablefill/index.hpp"
#include "tablefill/types.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tablefill {

/// Status code plus a UTF-8 JSON body. Error bodies are
/// {"code": str, "message": str, "details": any}.
struct ApiResponse {
    int status = 200;
    std::string body;
};

/// Request handlers over a loaded bundle, independent of the transport.
/// All handlers are const and safe to call concurrently.
class Service {
public:
    static constexpr std::size_t kDefaultLimit = 10;
    static constexpr std::size_t kMaxLimit = 100;

    Service(std::shared_ptr<const IndexBundle> bundle, ScoringParams params);

    ApiResponse suggest_rows(std::string_view body) const;
    ApiResponse suggest_columns(std::string_view body) const;
    ApiResponse search_entities(const std::optional<std::string>& q, const std::optional<std::string>& limit) const;
    ApiResponse search_labels(const std::optional<std::string>& q, const std::optional<std::string>& limit) const;
    ApiResponse entity(std::string_view id) const;
    ApiResponse health() const;

    const IndexBundle& bundle() const noexcept { return *bundle_; }

private:
    std::shared_ptr<const IndexBundle> bundle_;
    ScoringParams params_;
};

/// Raised when the server cannot bind its port.
class ServeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// HTTP/1.1 front end routing the /v1 endpoints to a Service.
class HttpServer {
public:
    explicit HttpServer(const Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port; port 0 picks a free port. Throws ServeError.
    void bind(const std::string& host, int port);
    int port() const noexcept { return port_; }

    /// Serves until stop(); in-flight requests complete before returning.
    void listen();
    void stop();
    /// Blocks until listen() is accepting connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = -1;
};

}  // namespace tablefill
