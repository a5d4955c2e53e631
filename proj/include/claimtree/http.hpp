#pragma once

#include <chrono>
#include <string>
#include <vector>
#include <utility>

#include <json.hpp>

namespace claimtree::http {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

// Throws Error(InvalidArgument) for anything that is not http(s)://host[:port][/path].
Url parse_url(const std::string& url);

struct PostOptions {
  std::chrono::milliseconds timeout{60000};
  std::size_t max_attempts = 3;  // transport failures and 5xx/429 are retried
  std::chrono::milliseconds backoff{250};
  std::vector<std::pair<std::string, std::string>> headers;
};

// POSTs a JSON body and parses a JSON reply. Throws Error(ProviderUnavailable)
// after exhausting attempts, Error(Timeout) when the server never answers.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const PostOptions& options);

}  // namespace claimtree::http
