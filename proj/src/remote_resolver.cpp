#include <atomic>
#include <exception>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "likecat/error.hpp"
#include "likecat/ingest.hpp"

namespace likecat {

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

RemoteResolver::RemoteResolver(RemoteResolverConfig config) : config_(std::move(config)) {
  if (config_.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "max_attempts must be >= 1");
  if (config_.max_in_flight < 1) throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
  const auto scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::InvalidConfig, "base_url needs a scheme: " + config_.base_url);
  const auto path = config_.base_url.find('/', scheme + 3);
  origin_ = config_.base_url.substr(0, path);
  path_prefix_ = path == std::string::npos ? "" : config_.base_url.substr(path);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::optional<CategoryPath> parse_category_response(const std::string& body) {
  auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object() || !doc.contains("category") || !doc["category"].is_string()) {
    throw Error(ErrorCode::TransportError, "response lacks a string 'category' field");
  }
  std::optional<std::string> sub;
  if (auto it = doc.find("subcategory"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::TransportError, "'subcategory' is not a string");
    if (!it->get<std::string>().empty()) sub = it->get<std::string>();
  }
  const auto category = doc["category"].get<std::string>();
  if (category.empty()) return std::nullopt;
  return CategoryPath(category, sub);
}

std::optional<CategoryPath> RemoteResolver::lookup(const std::string& like_id) {
  httplib::Client client(origin_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());

  const std::string target = path_prefix_ + "/" + httplib::detail::encode_url(like_id) + "?fields=category";
  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Get(target);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 404) return std::nullopt;
    if (res->status == 200) return parse_category_response(res->body);
    last_error = "HTTP " + std::to_string(res->status);
    if (!retryable(res->status)) break;
  }
  throw Error(ErrorCode::TransportError, "lookup of '" + like_id + "' failed: " + last_error);
}

std::vector<std::optional<CategoryPath>> RemoteResolver::lookup_batch(std::span<const std::string> ids) {
  std::vector<std::optional<CategoryPath>> results(ids.size());
  std::vector<std::exception_ptr> errors(ids.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      try {
        results[i] = lookup(ids[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config_.max_in_flight), ids.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  pool.clear();

  // Report the first failure in input order so the error is reproducible.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace likecat
