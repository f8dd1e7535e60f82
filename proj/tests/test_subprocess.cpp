#include <doctest.h>

#include "refiner/prover/subprocess.hpp"

using namespace refiner;

namespace {

SubprocessOptions fake_options() {
  SubprocessOptions o;
  o.executable = "python3";
  o.args = {REFINER_FIXTURES "/fake/fake_coqtop.py"};
  o.sentence_timeout = std::chrono::milliseconds(2000);
  o.script_timeout = std::chrono::milliseconds(4000);
  return o;
}

const char* const kStmt = "Lemma t : forall n m, n <= m -> n <= S m.";

}  // namespace

TEST_CASE("parse_goals reads hypotheses, divider and further goals") {
  std::string shown =
      "2 goals (ID 12)\n\n"
      "  n, m : nat\n"
      "  IHn : forall m : nat,\n"
      "        leb n m = true -> n <= m\n"
      "  ============================\n"
      "  S n <= m\n\n"
      "goal 2 is:\n"
      " 0 <= m\n";
  ProofState s = parse_goals(shown);
  REQUIRE(s.goals.size() == 2);
  const auto& g = s.goals[0];
  REQUIRE(g.hypotheses.size() == 3);
  CHECK(g.hypotheses[0].name == "n");
  CHECK(g.hypotheses[1].name == "m");
  CHECK(g.hypotheses[1].type_text == "nat");
  CHECK(g.hypotheses[2].type_text == "forall m : nat, leb n m = true -> n <= m");
  CHECK(g.conclusion == "S n <= m");
  CHECK(s.goals[1].conclusion == "0 <= m");
  CHECK(s.goals[1].hypotheses.empty());
}

TEST_CASE("parse_goals on a finished proof") {
  CHECK(parse_goals("No more goals.").complete());
  CHECK(parse_goals("No more subgoals.\n").complete());
}

TEST_CASE("format then parse is stable") {
  ProofState s;
  s.goals.push_back({{{"n", "nat"}, {"H", "n <= m"}}, "S n <= S m"});
  s.goals.push_back({{}, "m = m"});
  CHECK(parse_goals(format_state(s)) == s);
}

TEST_CASE("subprocess session against a fake prover") {
  SubprocessProver prover(fake_options());
  auto session = prover.open({});

  SUBCASE("accepted proof") {
    CHECK(session->execute_proof(kStmt, "Proof. solve. Qed.").passed());
    // The theorem was reset, so the same name can be proved again.
    CHECK(session->execute_proof(kStmt, "Proof. solve. Qed.").passed());
  }
  SUBCASE("error at a tactic reports prefix and last state") {
    auto out = session->execute_proof(kStmt, "Proof. split. solve. bogus. Qed.");
    REQUIRE_FALSE(out.passed());
    const auto& f = out.failure();
    CHECK(f.erroneous_tactic == "bogus.");
    CHECK(f.error_message == "Error: Unknown tactic bogus.");
    CHECK(f.partial_proof == "Proof. split. solve.");
    REQUIRE(f.stuck_state.goals.size() == 1);
    CHECK(f.stuck_state.goals[0].conclusion == "right_part");
    // Session still usable afterwards.
    CHECK(session->execute_proof(kStmt, "Proof. solve. Qed.").passed());
  }
  SUBCASE("incomplete proof fails at Qed") {
    auto out = session->execute_proof(kStmt, "Proof. split. solve.");
    REQUIRE_FALSE(out.passed());
    CHECK(out.failure().erroneous_tactic == "Qed.");
    CHECK(out.failure().error_message.find("incomplete") != std::string::npos);
  }
  SUBCASE("Admitted is a failure") {
    auto out = session->execute_proof(kStmt, "Proof. Admitted.");
    REQUIRE_FALSE(out.passed());
    CHECK(out.failure().erroneous_tactic == "Admitted.");
  }
  SUBCASE("statement validation") {
    CHECK(session->validate_statement(kStmt).valid);
    auto bad = session->validate_statement("Lemma u : undefined_thing = 0.");
    CHECK_FALSE(bad.valid);
    CHECK(bad.message.rfind("Error: The reference undefined_thing", 0) == 0);
  }
  SUBCASE("replay collects one state per tactic") {
    auto r = session->replay(kStmt, {"Proof.", "split.", "solve."});
    CHECK_FALSE(r.failure.has_value());
    REQUIRE(r.states.size() == 4);
    CHECK(r.states[2].goals.size() == 2);
    CHECK(r.states[3].goals.size() == 1);
  }
  SUBCASE("timeout restarts the process") {
    auto out = session->execute_proof(kStmt, "Proof. loop. Qed.");
    REQUIRE_FALSE(out.passed());
    CHECK(out.failure().error_message == "timeout");
    CHECK(session->execute_proof(kStmt, "Proof. solve. Qed.").passed());
  }
}

TEST_CASE("preamble items are sent on open") {
  SubprocessProver prover(fake_options());
  ContextItem lemma{"t", ItemKind::Lemma, kStmt, std::string("Proof. solve. Qed."), {}};
  auto session = prover.open({lemma});
  // "t" now exists in the prover, so declaring it again clashes.
  auto check = session->validate_statement(kStmt);
  CHECK_FALSE(check.valid);
  CHECK(check.message == "Error: t already exists.");
}

TEST_CASE("missing executable is reported as unavailable") {
  SubprocessOptions o;
  o.executable = "definitely-not-a-prover-binary";
  SubprocessProver prover(o);
  CHECK_THROWS_AS(prover.open({}), BackendUnavailable);
}

TEST_CASE("crashing prover is reported as unavailable") {
  SubprocessProver prover(fake_options());
  auto session = prover.open({});
  CHECK_THROWS_AS(session->execute_proof(kStmt, "Proof. crash. Qed."), BackendUnavailable);
}
