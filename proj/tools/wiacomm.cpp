// wiacomm: run the gateway service, edit the allowlist offline, or replay the demo.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wiacomm/control_api.hpp"
#include "wiacomm/demo.hpp"
#include "wiacomm/gateway.hpp"
#include "wiacomm/store_audit.hpp"

namespace {

using namespace wiacomm;

struct ServeOptions {
  std::string allowlist_path;
  std::string audit_path;
  double loss = 0.0;
  std::uint64_t seed = 0;
  std::string listen = "127.0.0.1:8080";
  double lock_secs = 300;
  double delay_ms = 0;
  std::string tx_log_path;
  std::string admin_token_file;
  std::vector<std::string> cors;
};

struct AllowlistOptions {
  std::string file;
  std::string mac;
  std::string label;
  std::string audit_path;
};

int fail(const std::string& reason) {
  std::cerr << "wiacomm: " << reason << '\n';
  return 1;
}

std::string read_admin_token(const std::string& token_file) {
  if (!token_file.empty()) {
    std::ifstream in(token_file);
    if (!in) throw std::runtime_error("cannot read admin token file " + token_file);
    std::string token;
    std::getline(in, token);
    return token;
  }
  const char* env = std::getenv(kAdminTokenEnv);
  return env != nullptr ? env : "";
}

int run_serve(const ServeOptions& opt) {
  const auto colon = opt.listen.rfind(':');
  if (colon == std::string::npos) return fail("--listen must be HOST:PORT");
  ApiConfig api;
  api.host = opt.listen.substr(0, colon);
  try {
    api.port = std::stoi(opt.listen.substr(colon + 1));
  } catch (const std::exception&) {
    return fail("--listen must be HOST:PORT");
  }
  api.cors_origins = opt.cors;

  GatewayConfig config;
  config.link.loss_probability = opt.loss;
  config.link.propagation_delay_ms = opt.delay_ms;
  config.link.rng_seed = opt.seed;
  config.lock_duration = std::chrono::milliseconds(static_cast<std::int64_t>(opt.lock_secs * 1000));
  config.allowlist_path = opt.allowlist_path;

  try {
    config.link.validate();
    api.admin_token = read_admin_token(opt.admin_token_file);
    Allowlist allowlist = load_allowlist(opt.allowlist_path);
    AuditWriter audit(opt.audit_path);

    std::optional<std::ofstream> tx_file;
    if (!opt.tx_log_path.empty()) {
      tx_file.emplace(opt.tx_log_path, std::ios::app);
      if (!*tx_file) return fail("cannot open transmitter log " + opt.tx_log_path);
    }
    static std::mutex stdout_mutex;
    auto tx_sink = [&tx_file](std::string_view line) {
      {
        std::lock_guard lock(stdout_mutex);
        std::cout << line << std::endl;
      }
      if (tx_file) *tx_file << line << std::endl;
    };

    // Block termination signals before any thread starts so sigwait below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Gateway gateway(config, std::move(allowlist), system_clock(), tx_sink);
    gateway.node().set_log_sink([](std::string_view line) {
      std::lock_guard lock(stdout_mutex);
      std::cout << line << std::endl;
    });
    gateway.add_audit_sink([&audit](const AuditRecord& record) { audit.append(record); });
    if (api.admin_token.empty()) {
      std::cerr << "wiacomm: " << kAdminTokenEnv << " not set; admin endpoints disabled\n";
    }

    ControlApi server(gateway, api);
    gateway.start_dispatcher();
    if (server.start() < 0) return fail("cannot listen on " + opt.listen);
    std::cerr << "wiacomm: listening on " << api.host << ':' << server.port() << '\n';

    int received = 0;
    sigwait(&signals, &received);
    server.stop();
    gateway.stop_dispatcher();
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

Allowlist load_or_empty(const std::string& file) {
  if (!std::filesystem::exists(file)) return {};
  return load_allowlist(file);
}

void audit_admin(const std::string& audit_path, AuditKind kind, const MacAddress& mac, const std::string& detail) {
  if (audit_path.empty()) return;
  append_audit(AuditRecord{system_clock()(), kind, mac, detail}, audit_path);
}

int run_allowlist_add(const AllowlistOptions& opt) {
  try {
    const MacAddress mac = parse_mac(opt.mac);
    if (!valid_label(opt.label)) return fail("label must be one trimmed line");
    Allowlist allowlist = load_or_empty(opt.file);
    allowlist[mac] = opt.label;
    save_allowlist(allowlist, opt.file);
    audit_admin(opt.audit_path, AuditKind::AdminAdd, mac, opt.label);
    return 0;
  } catch (const MalformedMac& e) {
    return fail(std::string("MalformedMac: ") + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_allowlist_rm(const AllowlistOptions& opt) {
  try {
    const MacAddress mac = parse_mac(opt.mac);
    Allowlist allowlist = load_allowlist(opt.file);
    if (allowlist.erase(mac) == 0) return fail(format_mac(mac) + " is not registered");
    save_allowlist(allowlist, opt.file);
    audit_admin(opt.audit_path, AuditKind::AdminRemove, mac, "");
    return 0;
  } catch (const MalformedMac& e) {
    return fail(std::string("MalformedMac: ") + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_allowlist_list(const AllowlistOptions& opt) {
  try {
    std::cout << serialize_allowlist(load_allowlist(opt.file));
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_demo_command() {
  const DemoResult result = run_demo();
  for (const auto& line : result.transmitter) std::cout << line << '\n';
  std::cout << '\n';
  for (const auto& line : result.receiver) std::cout << line << '\n';
  std::cout.flush();
  if (!result.transmitter_matches()) return fail("transmitter transcript mismatch");
  if (!result.receiver_matches()) return fail("receiver transcript mismatch");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Authenticated device-control gateway over a simulated LoRa link"};
  app.require_subcommand(1);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run gateway, link simulator and application node with the HTTP API");
  serve_cmd->add_option("--allowlist", serve.allowlist_path, "Allowlist file")->required();
  serve_cmd->add_option("--audit", serve.audit_path, "Audit log (JSON lines, appended)")->required();
  serve_cmd->add_option("--loss", serve.loss, "Per-frame loss probability")->check(CLI::Range(0.0, 1.0));
  serve_cmd->add_option("--seed", serve.seed, "Link RNG seed");
  serve_cmd->add_option("--listen", serve.listen, "HOST:PORT")->capture_default_str();
  serve_cmd->add_option("--lock-secs", serve.lock_secs, "Lockout after the alert, seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  serve_cmd->add_option("--delay-ms", serve.delay_ms, "Propagation delay, ms")->check(CLI::NonNegativeNumber);
  serve_cmd->add_option("--tx-log", serve.tx_log_path, "Mirror the transmitter log to this file");
  serve_cmd->add_option("--admin-token-file", serve.admin_token_file,
                        std::string("Read the admin token from this file instead of ") + kAdminTokenEnv);
  serve_cmd->add_option("--cors", serve.cors, "Allowed CORS origin (repeatable)");

  AllowlistOptions allow;
  auto* allow_cmd = app.add_subcommand("allowlist", "Edit the allowlist file offline");
  allow_cmd->require_subcommand(1);
  auto* add_cmd = allow_cmd->add_subcommand("add", "Register a MAC (replaces its label if present)");
  add_cmd->add_option("--file", allow.file, "Allowlist file")->required();
  add_cmd->add_option("--audit", allow.audit_path, "Append an admin_add record to this audit log");
  add_cmd->add_option("mac", allow.mac, "MAC address")->required();
  add_cmd->add_option("label", allow.label, "Label");
  auto* rm_cmd = allow_cmd->add_subcommand("rm", "Remove a MAC");
  rm_cmd->add_option("--file", allow.file, "Allowlist file")->required();
  rm_cmd->add_option("--audit", allow.audit_path, "Append an admin_remove record to this audit log");
  rm_cmd->add_option("mac", allow.mac, "MAC address")->required();
  auto* list_cmd = allow_cmd->add_subcommand("list", "Print the canonical allowlist");
  list_cmd->add_option("--file", allow.file, "Allowlist file")->required();

  auto* demo_cmd = app.add_subcommand("demo", "Replay the four-command demonstration on a lossless link");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "wiacomm: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
  }

  if (*serve_cmd) return run_serve(serve);
  if (*add_cmd) return run_allowlist_add(allow);
  if (*rm_cmd) return run_allowlist_rm(allow);
  if (*list_cmd) return run_allowlist_list(allow);
  if (*demo_cmd) return run_demo_command();
  return 1;
}
