#include <catch_amalgamated.hpp>

#include <algorithm>
#include <functional>
#include <set>

#include "delib/error.hpp"
#include "delib/ingest.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace delib;

namespace {

ErrorCode code_of(auto &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvariantViolation;
}

std::string message_of(auto &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("transcript with three rows keeps file order", "[ingest]") {
  auto ev = parse_transcript_csv("speaker,text\nA,First point.\nB,Second point.\nA,Third point.\n");
  REQUIRE(ev.statements.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ev.statements[i].seq_index == i);
  CHECK(ev.statements[1].speaker_id == "B");
  CHECK(ev.venue == Venue::legislative);
  REQUIRE(ev.speakers.size() == 2);
  CHECK(ev.speakers[0].speaker_id == "A");
  CHECK(ev.speakers[1].speaker_id == "B");
}

TEST_CASE("transcript errors name the column or row", "[ingest]") {
  CHECK(code_of([] { parse_transcript_csv("speaker,words\nA,hi\n"); }) == ErrorCode::MissingColumn);
  CHECK(message_of([] { parse_transcript_csv("speaker,words\nA,hi\n"); }) == "MissingColumn: text");
  CHECK(code_of([] { parse_transcript_csv(""); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_transcript_csv("  \n"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_transcript_csv("speaker,text\n"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_transcript_csv("speaker,text\nA,\n"); }) == ErrorCode::MalformedRow);
  CHECK(message_of([] { parse_transcript_csv("speaker,text\nA,ok\nB,  \n"); }).find("row 3") != std::string::npos);
  CHECK(code_of([] { parse_transcript_csv("speaker,text\nA,ok,extra\n"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([] { parse_transcript_csv("speaker,text,timestamp\nA,ok,noon\n"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([] { parse_transcript_csv("speaker,text,majority\nA,ok,maybe\n"); }) == ErrorCode::MalformedRow);
  CHECK(code_of([] { parse_transcript_csv("speaker,text\nA,caf\xe9\n"); }) == ErrorCode::InvalidEncoding);
}

TEST_CASE("transcript optional columns and tolerant booleans", "[ingest]") {
  auto ev = parse_transcript_csv(
      "Speaker,Text,Timestamp,Role,Party,State,Majority,Title\n"
      "Sen. A,We must act.,100,Member,D,CA,YES,Farm Bill Hearing\n"
      "Dr. B,Data shows it.,101,witness,,,,\n"
      "Sen. C,I disagree.,,member,R,TX,0,\n");
  CHECK(ev.title == "Farm Bill Hearing");
  const auto &s = ev.statements;
  CHECK(s[0].role == Role::member);
  CHECK(s[0].majority == true);
  CHECK(s[0].party == "D");
  CHECK(s[0].timestamp == 100);
  CHECK(s[1].role == Role::witness);
  CHECK_FALSE(s[1].party.has_value());
  CHECK_FALSE(s[1].majority.has_value());
  CHECK_FALSE(s[2].timestamp.has_value());
  CHECK(s[2].majority == false);
}

TEST_CASE("same bytes give the same event id", "[ingest]") {
  const std::string csv = "speaker,text\nA,one\n";
  CHECK(parse_transcript_csv(csv).id == parse_transcript_csv(csv).id);
  CHECK(parse_transcript_csv(csv).id != parse_transcript_csv(csv + "B,two\n").id);
  CHECK(parse_transcript_csv(csv).id.size() == 64);
}

TEST_CASE("thread comments are sorted by timestamp with stable ties", "[ingest]") {
  auto ev = parse_thread_json(R"({"title":"t","comments":[
      {"author":"a","body":"thirty","created_utc":30},
      {"author":"b","body":"ten","created_utc":10},
      {"author":"c","body":"twenty","created_utc":20},
      {"author":"d","body":"ten again","created_utc":10}]})");
  REQUIRE(ev.statements.size() == 4);
  CHECK(ev.statements[0].text == "ten");
  CHECK(ev.statements[1].text == "ten again");
  CHECK(ev.statements[2].text == "twenty");
  CHECK(ev.statements[3].text == "thirty");
  CHECK(ev.venue == Venue::forum);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ev.statements[i].seq_index == i);
}

TEST_CASE("nested reply chain of depth four flattens", "[ingest]") {
  auto ev = parse_thread_json(R"({"title":"t","comments":[
      {"author":"a","body":"root","created_utc":1,"replies":[
        {"author":"b","body":"r1","created_utc":4,"parent_id":"x","replies":[
          {"author":"c","body":"r2","created_utc":2,"replies":[
            {"author":"d","body":"r3","created_utc":3}]}]}]}]})");
  REQUIRE(ev.statements.size() == 4);
  CHECK(ev.statements[0].text == "root");
  CHECK(ev.statements[1].text == "r2");
  CHECK(ev.statements[2].text == "r3");
  CHECK(ev.statements[3].text == "r1");
}

TEST_CASE("thread errors", "[ingest]") {
  CHECK(code_of([] { parse_thread_json("not json"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_thread_json(R"({"comments":[]})"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_thread_json(R"({"title":"t","comments":[]})"); }) == ErrorCode::EmptyThread);
  CHECK(code_of([] { parse_thread_json(R"({"title":"t","comments":[{"author":"a","body":"b"}]})"); }) ==
        ErrorCode::MalformedDocument);
  CHECK(code_of([] { parse_thread_json(R"({"title":"t","comments":[{"author":"a","body":" ","created_utc":1}]})"); }) ==
        ErrorCode::MalformedDocument);
}

TEST_CASE("export then parse is the identity on statements", "[ingest]") {
  auto ev = parse_transcript_csv(
      "speaker,text,timestamp,role,party,state,majority\n"
      "A,\" leading space, comma\",5,member,D,CA,true\n"
      "B,\"line\nbreak and \"\"quotes\"\"\",,witness,,,\n"
      "C,plain,7,,,,\n");
  auto back = parse_transcript_csv(export_event_csv(ev));
  CHECK(back.statements == ev.statements);
  CHECK(back.speakers == ev.speakers);
}

TEST_CASE("absent optional fields export as empty cells", "[ingest]") {
  auto ev = parse_transcript_csv("speaker,text\nA,hello\n");
  auto out = export_event_csv(ev);
  CHECK(out == "speaker,text,timestamp,role,party,state,majority,title\r\nA,hello,,,,,,\r\n");
}

TEST_CASE("round trip holds on generated transcripts", "[ingest]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto ev = parse_transcript_csv(fixtures::transcript_csv(300, seed));
    auto back = parse_transcript_csv(export_event_csv(ev));
    REQUIRE(back.statements == ev.statements);
    CHECK(back.title == ev.title);
  }
}

TEST_CASE("thread flattening is a permutation with dense seq_index", "[ingest]") {
  const auto doc = fixtures::thread_json(500, 7);
  auto ev = parse_thread_json(doc);
  REQUIRE(ev.statements.size() == 500);
  std::multiset<std::string> bodies;
  for (const auto &s : ev.statements) bodies.insert(s.speaker_id + "|" + s.text);
  std::multiset<std::string> expected;
  std::function<void(const nlohmann::json &)> walk = [&](const nlohmann::json &arr) {
    for (const auto &c : arr) {
      expected.insert(c["author"].get<std::string>() + "|" + c["body"].get<std::string>());
      walk(c["replies"]);
    }
  };
  walk(nlohmann::json::parse(doc)["comments"]);
  CHECK(bodies == expected);
  for (std::size_t i = 0; i < ev.statements.size(); ++i) {
    CHECK(ev.statements[i].seq_index == i);
    if (i > 0) CHECK(*ev.statements[i - 1].timestamp <= *ev.statements[i].timestamp);
  }
}
