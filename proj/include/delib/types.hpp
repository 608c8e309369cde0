#ifndef DELIB_TYPES_HPP_
#define DELIB_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace delib {

enum class Venue { legislative, forum, other };
enum class Role { member, witness, other };

constexpr std::string_view to_string(Venue v) {
  switch (v) {
    case Venue::legislative: return "legislative";
    case Venue::forum: return "forum";
    case Venue::other: return "other";
  }
  return "other";
}

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::member: return "member";
    case Role::witness: return "witness";
    case Role::other: return "other";
  }
  return "other";
}

inline std::optional<Venue> venue_from_string(std::string_view s) {
  if (s == "legislative") return Venue::legislative;
  if (s == "forum") return Venue::forum;
  if (s == "other") return Venue::other;
  return std::nullopt;
}

inline std::optional<Role> role_from_string(std::string_view s) {
  if (s == "member") return Role::member;
  if (s == "witness") return Role::witness;
  if (s == "other") return Role::other;
  return std::nullopt;
}

/// One speaker turn or forum comment. `seq_index` is the event's clock;
/// timestamps are carried along but never drive ordering after ingest.
struct Statement {
  std::size_t seq_index = 0;
  std::optional<std::int64_t> timestamp;
  std::string speaker_id;
  std::string text;
  std::optional<Role> role;
  std::optional<std::string> party;
  std::optional<std::string> state;
  std::optional<bool> majority;

  bool operator==(const Statement &) const = default;
};

struct SpeakerRecord {
  std::string speaker_id;
  std::string display_name;
  std::optional<Role> role;
  std::optional<std::string> party;
  std::optional<std::string> state;
  std::optional<bool> majority;

  bool operator==(const SpeakerRecord &) const = default;
};

struct DiscourseEvent {
  std::string id;
  std::string title;
  Venue venue = Venue::other;
  std::optional<std::string> topic;
  std::vector<Statement> statements;
  std::vector<SpeakerRecord> speakers;  // ordered by first appearance

  bool operator==(const DiscourseEvent &) const = default;
};

/// One record per distinct speaker, ordered by first appearance. Optional
/// attributes are taken from the first statement that carries them.
inline std::vector<SpeakerRecord> aggregate_speakers(
    const std::vector<Statement> &statements) {
  std::vector<SpeakerRecord> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto &s : statements) {
    auto [it, fresh] = index.try_emplace(s.speaker_id, out.size());
    if (fresh) out.push_back(SpeakerRecord{s.speaker_id, s.speaker_id, {}, {}, {}, {}});
    SpeakerRecord *rec = &out[it->second];
    if (!rec->role && s.role) rec->role = s.role;
    if (!rec->party && s.party) rec->party = s.party;
    if (!rec->state && s.state) rec->state = s.state;
    if (!rec->majority && s.majority) rec->majority = s.majority;
  }
  return out;
}

}  // namespace delib

#endif  // DELIB_TYPES_HPP_
