#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace fsup {

/// The four judged dimensions of a student action. Declaration order is the
/// deficient-criterion tie priority used by hint selection (ethics first).
enum class Criterion { ethical_behavior, professionalism, medical_relevance, contextual_distraction };

inline constexpr std::array<Criterion, 4> kCriteria{Criterion::ethical_behavior, Criterion::professionalism,
                                                    Criterion::medical_relevance,
                                                    Criterion::contextual_distraction};

/// snake_case wire key ("medical_relevance").
std::string_view criterion_key(Criterion c);
/// Input variable name in the rule language ("MedicalRelevance").
std::string_view criterion_variable(Criterion c);
/// Human-readable name ("Medical Relevance").
std::string_view criterion_display(Criterion c);
std::optional<Criterion> criterion_from_key(std::string_view key);

enum class Provenance { heuristic, external };

std::string_view provenance_name(Provenance p);

/// One crisp value per criterion, each in [0,1] with 1 = best label.
struct CriterionScores {
  double professionalism = 1.0;
  double medical_relevance = 1.0;
  double ethical_behavior = 1.0;
  double contextual_distraction = 1.0;
  Provenance provenance = Provenance::heuristic;

  double get(Criterion c) const;
  void set(Criterion c, double value);

  bool operator==(const CriterionScores&) const = default;
};

/// Throws DomainError unless all four values are finite and in [0,1].
void check_scores(const CriterionScores& scores);

}  // namespace fsup
