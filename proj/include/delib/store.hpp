#ifndef DELIB_STORE_HPP_
#define DELIB_STORE_HPP_

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "delib/error.hpp"
#include "delib/serialize.hpp"
#include "delib/types.hpp"

namespace delib {

struct EventSummary {
  std::string event_id;
  std::string title;
  Venue venue = Venue::other;
  std::size_t n_statements = 0;

  bool operator==(const EventSummary &) const = default;
};

inline void to_json(Json &j, const EventSummary &s) {
  j = Json{{"event_id", s.event_id},
           {"title", s.title},
           {"venue", std::string(to_string(s.venue))},
           {"n_statements", s.n_statements}};
}

/// Document kinds kept per (event, key).
enum class DocKind { analysis, structure, segmentation };

constexpr std::string_view to_string(DocKind k) {
  switch (k) {
    case DocKind::analysis: return "analyses";
    case DocKind::structure: return "structures";
    case DocKind::segmentation: return "segments";
  }
  return "analyses";
}

/// Persistence interface. Documents are opaque canonical JSON strings and
/// are written atomically; implementations must be safe for concurrent use.
class Store {
 public:
  virtual ~Store() = default;
  /// Returns true if the event was new.
  virtual bool put_event(const DiscourseEvent &ev) = 0;
  virtual std::optional<DiscourseEvent> get_event(const std::string &id) const = 0;
  virtual bool has_event(const std::string &id) const = 0;
  virtual std::vector<EventSummary> list_events() const = 0;
  virtual void put_document(DocKind kind, const std::string &event_id, const std::string &key,
                            const std::string &bytes) = 0;
  virtual std::optional<std::string> get_document(DocKind kind, const std::string &event_id,
                                                  const std::string &key) const = 0;
};

namespace detail {

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::StoreFailure, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temp file, fsyncs, then renames over the target.
inline void atomic_write(const std::filesystem::path &target, std::string_view bytes) {
  static std::atomic<unsigned long> counter{0};
  std::filesystem::create_directories(target.parent_path());
  auto tmp = target;
  tmp += "." + std::to_string(::getpid()) + "." + std::to_string(counter++) + ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw Error(ErrorCode::StoreFailure, "cannot create " + tmp.string());
  const char *p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      ::close(fd);
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::StoreFailure, "write failed for " + tmp.string());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::StoreFailure, "rename failed for " + target.string() + ": " + ec.message());
  }
}

inline bool is_safe_key(std::string_view s) {
  if (s.empty() || s.size() > 128) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

inline std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace detail

/// Directory-backed store:
///   root/events/<id>.json
///   root/analyses/<event>/<fingerprint>.json (likewise structures/, segments/)
///   root/index.json
/// The index is rebuilt from the directory contents on construction, and
/// stray temp files from interrupted writes are removed.
class FileStore final : public Store {
 public:
  explicit FileStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "events");
    recover();
  }

  const std::filesystem::path &root() const { return root_; }

  bool put_event(const DiscourseEvent &ev) override {
    check_key(ev.id);
    std::lock_guard lock(mu_);
    if (events_.count(ev.id)) return false;
    detail::atomic_write(event_path(ev.id), canonical(ev));
    events_[ev.id] = Entry{summarize(ev), detail::unix_now()};
    write_index_locked();
    return true;
  }

  std::optional<DiscourseEvent> get_event(const std::string &id) const override {
    if (!detail::is_safe_key(id)) return std::nullopt;
    {
      std::lock_guard lock(mu_);
      if (!events_.count(id)) return std::nullopt;
    }
    return Json::parse(detail::read_file(event_path(id))).get<DiscourseEvent>();
  }

  bool has_event(const std::string &id) const override {
    std::lock_guard lock(mu_);
    return events_.count(id) > 0;
  }

  std::vector<EventSummary> list_events() const override {
    std::lock_guard lock(mu_);
    std::vector<EventSummary> out;
    for (const auto &[id, e] : events_) out.push_back(e.summary);
    return out;
  }

  void put_document(DocKind kind, const std::string &event_id, const std::string &key,
                    const std::string &bytes) override {
    check_key(event_id);
    check_key(key);
    std::lock_guard lock(mu_);
    detail::atomic_write(doc_path(kind, event_id, key), bytes);
    docs_[{kind, event_id, key}] = detail::unix_now();
    write_index_locked();
  }

  std::optional<std::string> get_document(DocKind kind, const std::string &event_id,
                                          const std::string &key) const override {
    if (!detail::is_safe_key(event_id) || !detail::is_safe_key(key)) return std::nullopt;
    {
      std::lock_guard lock(mu_);
      if (!docs_.count({kind, event_id, key})) return std::nullopt;
    }
    return detail::read_file(doc_path(kind, event_id, key));
  }

  /// Creation time (unix seconds) of a stored document, if present.
  std::optional<std::int64_t> created_at(DocKind kind, const std::string &event_id, const std::string &key) const {
    std::lock_guard lock(mu_);
    auto it = docs_.find({kind, event_id, key});
    if (it == docs_.end()) return std::nullopt;
    return it->second;
  }

 private:
  struct Entry {
    EventSummary summary;
    std::int64_t created_at = 0;
  };
  using DocKey = std::tuple<DocKind, std::string, std::string>;

  static void check_key(const std::string &k) {
    if (!detail::is_safe_key(k)) throw Error(ErrorCode::StoreFailure, "unsafe store key '" + k + "'");
  }

  static std::string canonical(const DiscourseEvent &ev) { return Json(ev).dump(); }

  static EventSummary summarize(const DiscourseEvent &ev) {
    return EventSummary{ev.id, ev.title, ev.venue, ev.statements.size()};
  }

  std::filesystem::path event_path(const std::string &id) const { return root_ / "events" / (id + ".json"); }

  std::filesystem::path doc_path(DocKind kind, const std::string &event_id, const std::string &key) const {
    return root_ / std::string(to_string(kind)) / event_id / (key + ".json");
  }

  void write_index_locked() {
    Json ev = Json::object();
    for (const auto &[id, e] : events_) {
      Json s = e.summary;
      s["created_at"] = e.created_at;
      ev[id] = std::move(s);
    }
    Json docs = Json::object();
    for (const auto &[k, t] : docs_) {
      const auto &[kind, event_id, key] = k;
      docs[std::string(to_string(kind))][event_id][key] = Json{{"created_at", t}};
    }
    detail::atomic_write(root_ / "index.json", Json{{"events", ev}, {"documents", docs}}.dump(1));
  }

  // Reconciles the index with what is actually on disk. Creation times are
  // carried over from the previous index when it can be read.
  void recover() {
    namespace fs = std::filesystem;
    std::lock_guard lock(mu_);
    for (auto it = fs::recursive_directory_iterator(root_); it != fs::recursive_directory_iterator(); ++it)
      if (it->is_regular_file() && it->path().extension() == ".tmp") fs::remove(it->path());

    Json old;
    try {
      if (fs::exists(root_ / "index.json")) old = Json::parse(detail::read_file(root_ / "index.json"));
    } catch (const std::exception &) {
      old = Json();
    }
    auto old_time = [&](const Json::json_pointer &ptr) -> std::int64_t {
      if (old.is_object() && old.contains(ptr) && old[ptr].is_number_integer()) return old[ptr].get<std::int64_t>();
      return detail::unix_now();
    };

    for (const auto &f : fs::directory_iterator(root_ / "events")) {
      if (f.path().extension() != ".json") continue;
      const std::string id = f.path().stem().string();
      try {
        auto ev = Json::parse(detail::read_file(f.path())).get<DiscourseEvent>();
        if (ev.id != id) continue;
        events_[id] = Entry{summarize(ev), old_time(Json::json_pointer("/events/" + id + "/created_at"))};
      } catch (const std::exception &) {
        // Unreadable documents are left on disk but not indexed.
      }
    }
    for (DocKind kind : {DocKind::analysis, DocKind::structure, DocKind::segmentation}) {
      const auto dir = root_ / std::string(to_string(kind));
      if (!fs::exists(dir)) continue;
      for (const auto &evdir : fs::directory_iterator(dir)) {
        if (!evdir.is_directory()) continue;
        const std::string event_id = evdir.path().filename().string();
        for (const auto &f : fs::directory_iterator(evdir.path())) {
          if (f.path().extension() != ".json") continue;
          const std::string key = f.path().stem().string();
          if (!Json::accept(detail::read_file(f.path()))) continue;
          docs_[{kind, event_id, key}] = old_time(Json::json_pointer(
              "/documents/" + std::string(to_string(kind)) + "/" + event_id + "/" + key + "/created_at"));
        }
      }
    }
    write_index_locked();
  }

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> events_;
  std::map<DocKey, std::int64_t> docs_;
};

}  // namespace delib

#endif  // DELIB_STORE_HPP_
