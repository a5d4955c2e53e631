#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "claimtree/http.hpp"

#include <regex>
#include <thread>

#include "claimtree/error.hpp"

namespace claimtree::http {

Url parse_url(const std::string& url) {
  static const std::regex kPattern(R"(^(https?://[^/\s]+)(/[^\s]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kPattern)) {
    throw Error(ErrorCode::InvalidArgument, "not an http(s) URL: '" + url + "'");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const PostOptions& options) {
  const Url target = parse_url(url);
  httplib::Client client(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  for (const auto& [k, v] : options.headers) headers.emplace(k, v);
  const std::string payload = body.dump();

  std::string last_error = "no attempt made";
  bool timed_out = false;
  const std::size_t attempts = std::max<std::size_t>(1, options.max_attempts);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options.backoff * (1 << (attempt - 1)));

    auto res = client.Post(target.path, headers, payload, "application/json");
    if (!res) {
      auto err = res.error();
      timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
      last_error = httplib::to_string(err);
      continue;
    }
    timed_out = false;
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::ProviderUnavailable,
                  url + " answered HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::ProviderUnavailable, url + " returned a non-JSON body");
    }
  }
  if (timed_out) {
    throw Error(ErrorCode::Timeout, url + " did not answer within " +
                                        std::to_string(options.timeout.count()) + " ms");
  }
  throw Error(ErrorCode::ProviderUnavailable,
              url + " unavailable after " + std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace claimtree::http
