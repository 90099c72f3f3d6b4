#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsup/criteria.hpp"

namespace fsup::scoring {

struct ClassifierConfig {
  std::string url;  // base URL, e.g. http://127.0.0.1:9000 ; empty disables the client
  int timeout_ms = 2000;
  int breaker_threshold = 3;  // consecutive failures that open the breaker
  int cooldown_ms = 60000;    // how long an open breaker rejects calls
};

struct ClassifierRequest {
  std::string session_id;
  std::string text;
  std::string target_agent;
  std::vector<std::string> context;
  std::vector<std::string> criteria;  // defaults to all four keys when empty
};

struct ClassifierResponse {
  CriterionScores scores;  // provenance = external
  std::map<std::string, std::string> labels;
  double latency_ms = 0.0;
  std::vector<std::string> warnings;  // one per clamped score
};

std::string classifier_request_body(const ClassifierRequest& req);

/// Parses {"scores":{criterion:number,...},"labels":{...}}. Missing or
/// non-numeric scores make the body malformed (nullopt). Out-of-range values
/// are clamped and reported in warnings.
std::optional<ClassifierResponse> parse_classifier_response(std::string_view body);

/// Opens after `threshold` consecutive failures and rejects calls until the
/// cool-down elapses; the first call after that is a trial.
class CircuitBreaker {
 public:
  using Clock = std::chrono::steady_clock;

  CircuitBreaker(int threshold, std::chrono::milliseconds cooldown) : threshold_(threshold), cooldown_(cooldown) {}

  bool allow(Clock::time_point now = Clock::now());
  void record_success();
  void record_failure(Clock::time_point now = Clock::now());
  bool is_open(Clock::time_point now = Clock::now()) const;
  int consecutive_failures() const;

 private:
  mutable std::mutex mu_;
  int threshold_;
  std::chrono::milliseconds cooldown_;
  int failures_ = 0;
  std::optional<Clock::time_point> open_until_;
};

class ClassifierClient {
 public:
  virtual ~ClassifierClient() = default;
  /// nullopt on any failure; never throws.
  virtual std::optional<ClassifierResponse> score(const ClassifierRequest& req) = 0;
};

/// POSTs to {url}/score. Safe to share between sessions.
class HttpClassifierClient final : public ClassifierClient {
 public:
  explicit HttpClassifierClient(ClassifierConfig cfg);

  std::optional<ClassifierResponse> score(const ClassifierRequest& req) override;
  const CircuitBreaker& breaker() const { return breaker_; }

 private:
  ClassifierConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // base path + "/score"
  CircuitBreaker breaker_;
};

}  // namespace fsup::scoring
