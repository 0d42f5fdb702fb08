#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sdprofile/time.hpp"

namespace sdprofile {

enum class ApiErrorCode { not_found, conflict, bad_request, illegal_transition, internal };

std::string_view to_string(ApiErrorCode c);
// 404, 409, 400, 409, 500.
int http_status(ApiErrorCode c);

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using QueryParams = std::multimap<std::string, std::string>;

// HTTP front end over a store. Holds the store lock for its lifetime (single
// writer). Reads run concurrently; mutations are serialized and journaled
// before they are acknowledged.
class Service {
public:
    using Clock = std::function<Timestamp()>;

    // Loads (or, when the file is missing, starts an empty) store.
    // Throws StoreLocked, StoreError.
    explicit Service(std::filesystem::path store_path, Clock clock = now_utc);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Routes one request. `path` is already percent-decoded.
    ApiResponse dispatch(std::string_view method, std::string_view path, const QueryParams& params,
                         std::string_view body);

    // Blocks serving HTTP on host:port until stop(). Returns false if the
    // socket could not be bound.
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it; then call listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    bool is_running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sdprofile
