#include "refiner/prover/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <optional>

#include "refiner/core/text.hpp"
#include "refiner/prover/sentences.hpp"

namespace refiner {

namespace {

const char* const kDivider = "============================";

std::string strip_tags(std::string s) {
  for (const char* tag : {"<prompt>", "</prompt>", "<infomsg>", "</infomsg>", "<warning>",
                          "</warning>"}) {
    std::size_t pos;
    while ((pos = s.find(tag)) != std::string::npos) s.erase(pos, std::strlen(tag));
  }
  return s;
}

bool is_divider(const std::string& line) {
  std::string t = text::trim(line);
  return t.size() >= 4 && t.find_first_not_of('=') == std::string::npos;
}

}  // namespace

ProofState parse_goals(const std::string& output) {
  ProofState state;
  auto lines = text::split_lines(strip_tags(output));
  std::size_t i = 0;
  auto at_end = [&] { return i >= lines.size(); };

  // Hypotheses of the focused goal, up to the divider.
  std::size_t divider = lines.size();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (is_divider(lines[k])) {
      divider = k;
      break;
    }
  }
  if (divider == lines.size()) return state;  // "No more goals." or nothing useful

  Goal first;
  for (i = 0; i < divider; ++i) {
    std::string line = text::trim(lines[i]);
    if (line.empty()) continue;
    if (line.find(" goal") != std::string::npos && std::isdigit(static_cast<unsigned char>(line[0])))
      continue;  // "1 goal", "2 goals (ID 5)"
    auto colon = line.find(" : ");
    bool continuation = std::isspace(static_cast<unsigned char>(lines[i][0])) &&
                        lines[i].find_first_not_of(' ') > 2 && !first.hypotheses.empty() &&
                        colon == std::string::npos;
    if (colon == std::string::npos || continuation) {
      if (!first.hypotheses.empty()) first.hypotheses.back().type_text += " " + line;
      continue;
    }
    std::string names = line.substr(0, colon);
    std::string type = text::trim(line.substr(colon + 3));
    // "n, m : nat" introduces several hypotheses of one type.
    for (const auto& n : text::identifier_tokens(names)) first.hypotheses.push_back({n, type});
  }

  // Conclusion lines until the next "goal N is:" header or a blank gap.
  std::string concl;
  for (i = divider + 1; !at_end(); ++i) {
    std::string line = text::trim(lines[i]);
    if (text::starts_with_word(line, "goal") || line.empty()) break;
    if (!concl.empty()) concl += " ";
    concl += line;
  }
  first.conclusion = concl;
  state.goals.push_back(std::move(first));

  for (; !at_end(); ++i) {
    std::string line = text::trim(lines[i]);
    if (!text::starts_with_word(line, "goal")) continue;
    Goal g;
    for (++i; !at_end(); ++i) {
      std::string l = text::trim(lines[i]);
      if (l.empty() || text::starts_with_word(l, "goal")) {
        --i;
        break;
      }
      if (!g.conclusion.empty()) g.conclusion += " ";
      g.conclusion += l;
    }
    state.goals.push_back(std::move(g));
  }
  return state;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Response {
  std::string text;
  bool timed_out = false;
  bool error = false;
  std::string error_message;
};

// One running prover process.
class Process {
 public:
  Process(const SubprocessOptions& opts) : opts_(opts) { start(); }
  ~Process() { stop(); }
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  Response send(const std::string& sentence, Clock::time_point script_deadline) {
    std::string line = sentence + "\n";
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
      ssize_t n = ::write(in_fd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BackendUnavailable("prover input closed: " + std::string(std::strerror(errno)));
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    auto deadline = std::min(script_deadline, Clock::now() + opts_.sentence_timeout);
    return read_response(deadline);
  }

  Response read_response(Clock::time_point deadline) {
    Response r;
    while (true) {
      auto marker = buffer_.find(opts_.prompt_marker);
      if (marker != std::string::npos) {
        r.text = buffer_.substr(0, marker);
        buffer_.erase(0, marker + opts_.prompt_marker.size());
        break;
      }
      auto now = Clock::now();
      if (now >= deadline) {
        r.timed_out = true;
        return r;
      }
      pollfd pfd{out_fd_, POLLIN, 0};
      int ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
      int rc = ::poll(&pfd, 1, ms);
      if (rc < 0 && errno == EINTR) continue;
      if (rc <= 0) continue;
      char buf[4096];
      ssize_t n = ::read(out_fd_, buf, sizeof buf);
      if (n <= 0) throw BackendUnavailable("prover process exited unexpectedly");
      buffer_.append(buf, static_cast<std::size_t>(n));
    }
    // Drop the opening half of the prompt tag so it does not leak into text.
    std::string clean = strip_tags(r.text);
    auto prompt_open = clean.rfind("Coq <");
    if (prompt_open != std::string::npos && clean.find('\n', prompt_open) == std::string::npos)
      clean.erase(prompt_open);
    r.text = clean;
    auto lines = text::split_lines(r.text);
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (lines[k].rfind("Error", 0) == 0) {
        r.error = true;
        std::string msg;
        for (std::size_t m = k; m < lines.size(); ++m) {
          if (!msg.empty()) msg += "\n";
          msg += lines[m];
        }
        r.error_message = text::trim(msg);
        break;
      }
    }
    return r;
  }

 private:
  void start() {
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
      throw BackendUnavailable("cannot create pipes for the prover");
    // Exec failure is reported through this close-on-exec pipe.
    int status_pipe[2];
    if (::pipe2(status_pipe, O_CLOEXEC) != 0) throw BackendUnavailable("cannot create pipes");
    pid_ = ::fork();
    if (pid_ < 0) throw BackendUnavailable("fork failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::dup2(from_child[1], STDERR_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::close(status_pipe[0]);
      std::vector<char*> argv;
      argv.push_back(const_cast<char*>(opts_.executable.c_str()));
      for (const auto& a : opts_.args) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      ::execvp(argv[0], argv.data());
      int err = errno;
      [[maybe_unused]] auto ignored = ::write(status_pipe[1], &err, sizeof err);
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    ::close(status_pipe[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    int err = 0;
    ssize_t n = ::read(status_pipe[0], &err, sizeof err);
    ::close(status_pipe[0]);
    if (n == sizeof err) {
      stop();
      throw BackendUnavailable("cannot execute " + opts_.executable + ": " + std::strerror(err));
    }
    ::signal(SIGPIPE, SIG_IGN);
    // Consume the banner up to the first prompt.
    auto first = read_response(Clock::now() + opts_.sentence_timeout);
    if (first.timed_out) {
      stop();
      throw BackendUnavailable("prover did not show a prompt: " + opts_.executable);
    }
  }

  void stop() {
    if (in_fd_ >= 0) ::close(in_fd_);
    if (out_fd_ >= 0) ::close(out_fd_);
    in_fd_ = out_fd_ = -1;
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
      pid_ = -1;
    }
  }

  const SubprocessOptions& opts_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
};

class SubprocessSession : public ProverSession {
 public:
  SubprocessSession(SubprocessOptions opts, std::vector<ContextItem> preamble)
      : ProverSession(std::move(preamble)), opts_(std::move(opts)) {
    restart();
  }

  ProofOutcome execute_proof(const std::string& theorem_statement,
                             const std::string& proof_script) override {
    auto deadline = Clock::now() + opts_.script_timeout;
    std::vector<std::string> sentences = sentence_texts(proof_script);
    if (sentences.empty() || !is_any_close(sentences.back())) sentences.push_back("Qed.");

    auto opened = send(theorem_statement, deadline);
    if (opened.timed_out || opened.error) {
      FailureReport r{text::normalize_ws(theorem_statement),
                      opened.timed_out ? "timeout" : opened.error_message, "", ProofState{}};
      recover(opened.timed_out);
      return ProofOutcome::fail(std::move(r));
    }
    ProofState last = initial_state(theorem_statement);
    std::vector<std::string> done;
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      const std::string& s = sentences[k];
      bool closing = k + 1 == sentences.size();
      if (closing && !is_accepting_close(s)) {
        // Admitted/Abort would be accepted by the prover but prove nothing.
        abort_proof(deadline);
        return ProofOutcome::fail({s, "Proof closed with " + s + " Admitted and aborted proofs prove nothing.",
                                   join_sentences(done), last});
      }
      auto r = send(s, deadline);
      if (r.timed_out || r.error) {
        FailureReport report{s, r.timed_out ? "timeout" : r.error_message, join_sentences(done), last};
        if (r.timed_out) {
          recover(true);
        } else {
          abort_proof(deadline);
        }
        return ProofOutcome::fail(std::move(report));
      }
      if (closing) break;
      done.push_back(s);
      auto shown = send("Show.", deadline);
      if (shown.timed_out) {
        recover(true);
        return ProofOutcome::fail({s, "timeout", join_sentences(done), last});
      }
      if (!shown.error) last = parse_goals(shown.text);
    }
    // The theorem now exists in this process; drop it to keep the session
    // bound to its preamble.
    std::string name = text::declared_name(theorem_statement);
    if (!name.empty()) send("Reset " + name + ".", deadline);
    return ProofOutcome::pass();
  }

  StatementCheck validate_statement(const std::string& statement) override {
    auto deadline = Clock::now() + opts_.script_timeout;
    auto r = send(statement, deadline);
    if (r.timed_out) {
      recover(true);
      return {false, "timeout"};
    }
    if (r.error) return {false, r.error_message};
    send("Abort.", deadline);
    return {true, ""};
  }

  ReplayResult replay(const std::string& theorem_statement,
                      const std::vector<std::string>& tactics) override {
    auto deadline = Clock::now() + opts_.script_timeout;
    ReplayResult out;
    auto opened = send(theorem_statement, deadline);
    if (opened.timed_out || opened.error) {
      out.failure = FailureReport{text::normalize_ws(theorem_statement),
                                  opened.timed_out ? "timeout" : opened.error_message, "", {}};
      recover(opened.timed_out);
      return out;
    }
    out.states.push_back(initial_state(theorem_statement));
    auto shown = send("Show.", deadline);
    if (!shown.timed_out && !shown.error) out.states.back() = parse_goals(shown.text);
    std::vector<std::string> done;
    for (const auto& t : tactics) {
      auto r = send(t, deadline);
      if (r.timed_out || r.error) {
        out.failure = FailureReport{t, r.timed_out ? "timeout" : r.error_message,
                                    join_sentences(done), out.states.back()};
        if (r.timed_out) recover(true);
        else abort_proof(deadline);
        return out;
      }
      done.push_back(t);
      auto s = send("Show.", deadline);
      out.states.push_back(s.error || s.timed_out ? ProofState{} : parse_goals(s.text));
    }
    abort_proof(deadline);
    return out;
  }

 private:
  Response send(const std::string& sentence, Clock::time_point deadline) {
    return process_->send(text::normalize_ws(sentence), deadline);
  }

  void abort_proof(Clock::time_point deadline) { send("Abort All.", deadline); }

  void recover(bool restart_process) {
    if (restart_process) restart();
  }

  void restart() {
    process_.reset();
    process_ = std::make_unique<Process>(opts_);
    auto deadline = Clock::now() + opts_.script_timeout;
    for (const auto& item : preamble()) {
      auto r = send(item.statement, deadline);
      if (!r.error && is_provable(item.kind)) {
        std::string body = item.proof.value_or("Admitted.");
        for (const auto& s : sentence_texts(body)) {
          r = send(s, deadline);
          if (r.error || r.timed_out) break;
        }
      }
      if (r.error || r.timed_out)
        throw BackendUnavailable("preamble rejected at " + item.name + ": " +
                                 (r.timed_out ? std::string("timeout") : r.error_message));
    }
  }

  SubprocessOptions opts_;
  std::unique_ptr<Process> process_;
};

}  // namespace

std::unique_ptr<ProverSession> SubprocessProver::open(std::vector<ContextItem> preamble) const {
  return std::make_unique<SubprocessSession>(options_, std::move(preamble));
}

}  // namespace refiner
