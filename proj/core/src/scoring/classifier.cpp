#include "fsup/scoring/classifier.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fsup/error.hpp"

namespace fsup::scoring {

using nlohmann::json;

std::string classifier_request_body(const ClassifierRequest& req) {
  std::vector<std::string> criteria = req.criteria;
  if (criteria.empty()) {
    for (auto c : kCriteria) criteria.emplace_back(criterion_key(c));
  }
  json body{{"session_id", req.session_id},
            {"text", req.text},
            {"target_agent", req.target_agent},
            {"context", req.context},
            {"criteria", criteria}};
  return body.dump();
}

std::optional<ClassifierResponse> parse_classifier_response(std::string_view body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  const auto scores = doc.find("scores");
  if (scores == doc.end() || !scores->is_object()) return std::nullopt;

  ClassifierResponse out;
  out.scores.provenance = Provenance::external;
  for (auto c : kCriteria) {
    const auto v = scores->find(criterion_key(c));
    if (v == scores->end() || !v->is_number()) return std::nullopt;
    const double raw = v->get<double>();
    if (!std::isfinite(raw)) return std::nullopt;
    const double clamped = std::clamp(raw, 0.0, 1.0);
    if (clamped != raw) {
      out.warnings.push_back(std::string(criterion_key(c)) + " score " + json(raw).dump() + " clamped to " +
                             json(clamped).dump());
    }
    out.scores.set(c, clamped);
  }
  if (const auto labels = doc.find("labels"); labels != doc.end() && labels->is_object()) {
    for (const auto& [k, v] : labels->items()) {
      if (v.is_string()) out.labels[k] = v.get<std::string>();
    }
  }
  return out;
}

bool CircuitBreaker::allow(Clock::time_point now) {
  std::lock_guard lock(mu_);
  if (!open_until_) return true;
  if (now < *open_until_) return false;
  open_until_.reset();  // half-open: let one trial through
  failures_ = threshold_ - 1;
  return true;
}

void CircuitBreaker::record_success() {
  std::lock_guard lock(mu_);
  failures_ = 0;
  open_until_.reset();
}

void CircuitBreaker::record_failure(Clock::time_point now) {
  std::lock_guard lock(mu_);
  if (++failures_ >= threshold_) open_until_ = now + cooldown_;
}

bool CircuitBreaker::is_open(Clock::time_point now) const {
  std::lock_guard lock(mu_);
  return open_until_ && now < *open_until_;
}

int CircuitBreaker::consecutive_failures() const {
  std::lock_guard lock(mu_);
  return failures_;
}

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("classifier url must include a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  std::string origin = slash == std::string::npos ? url : url.substr(0, slash);
  std::string path = slash == std::string::npos ? std::string() : url.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {origin, path + "/score"};
}

}  // namespace

HttpClassifierClient::HttpClassifierClient(ClassifierConfig cfg)
    : cfg_(std::move(cfg)),
      breaker_(std::max(1, cfg_.breaker_threshold), std::chrono::milliseconds(std::max(0, cfg_.cooldown_ms))) {
  std::tie(origin_, path_) = split_url(cfg_.url);
  if (origin_.rfind("http://", 0) != 0) throw ConfigError("classifier url must use http://: " + cfg_.url);
}

std::optional<ClassifierResponse> HttpClassifierClient::score(const ClassifierRequest& req) {
  if (!breaker_.allow()) return std::nullopt;
  const auto started = std::chrono::steady_clock::now();
  try {
    httplib::Client client(origin_);
    const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const auto res = client.Post(path_, classifier_request_body(req), "application/json");
    if (!res) {
      spdlog::warn("classifier request failed: {}", httplib::to_string(res.error()));
      breaker_.record_failure();
      return std::nullopt;
    }
    if (res->status != 200) {
      spdlog::warn("classifier returned HTTP {}", res->status);
      breaker_.record_failure();
      return std::nullopt;
    }
    auto parsed = parse_classifier_response(res->body);
    if (!parsed) {
      spdlog::warn("classifier returned a malformed body");
      breaker_.record_failure();
      return std::nullopt;
    }
    for (const auto& w : parsed->warnings) spdlog::warn("classifier: {}", w);
    parsed->latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    breaker_.record_success();
    return parsed;
  } catch (const std::exception& e) {
    spdlog::warn("classifier request failed: {}", e.what());
    breaker_.record_failure();
    return std::nullopt;
  }
}

}  // namespace fsup::scoring
