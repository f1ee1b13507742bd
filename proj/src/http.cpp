#include "qsv/http.hpp"

#include <thread>

#include <httplib.h>

namespace qsv::http {

Url parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("not an absolute URL: '" + url + "'");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme in '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    Url out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (out.origin.size() <= scheme_end + 3) throw ConfigError("URL has no host: '" + url + "'");
    return out;
}

std::string post_json(const std::string& url, const std::string& body, const RetryPolicy& policy) {
    const Url target = parse_url(url);
    httplib::Client client(target.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    std::string last_error;
    auto backoff = policy.initial_backoff;
    const int attempts = policy.max_attempts < 1 ? 1 : policy.max_attempts;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (auto res = client.Post(target.path, body, "application/json")) {
            if (res->status >= 200 && res->status < 300) return res->body;
            last_error = "HTTP status " + std::to_string(res->status);
        } else {
            last_error = httplib::to_string(res.error());
        }
        if (attempt < attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw TransportError("POST " + url + " failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace qsv::http
