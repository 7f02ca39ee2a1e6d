#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "poly/certificate.hpp"
#include "poly/checker.hpp"
#include "poly/polyhedron.hpp"
#include "poly/trace.hpp"

namespace {

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int runReplay(const std::string &file, bool checkCerts, bool oracle,
              const std::string &statsOut) {
  poly::trace::Trace t;
  try {
    t = poly::trace::parse(readFile(file));
  } catch (const std::exception &e) {
    std::cerr << file << ": " << e.what() << "\n";
    return 2;
  }

  poly::trace::RunReport rep =
      poly::trace::replay(t, {.checkCerts = checkCerts, .oracle = oracle});

  for (const poly::trace::OpRecord &rec : rep.records) {
    std::cout << "[line " << rec.line << "] "
              << poly::trace::opKindName(rec.kind);
    if (!rec.dst.empty())
      std::cout << ' ' << rec.dst;
    std::cout << " -> " << rec.resultText;
    char buf[48];
    std::snprintf(buf, sizeof buf, "  (%.3f ms)", rec.ms);
    std::cout << buf << "\n";
  }
  std::cout << "\n" << poly::trace::formatReport(rep);

  if (!statsOut.empty()) {
    std::ofstream out(statsOut, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << statsOut << "'\n";
      return 2;
    }
    out << poly::trace::statsJson(rep) << "\n";
  }
  return rep.ok() ? 0 : 1;
}

int runCheck(const std::string &p1File, const std::string &p2File,
             const std::string &certFile) {
  std::uint32_t n1 = 0, n2 = 0;
  poly::CheckerPolyhedron premise, target;
  poly::Cert cert;
  try {
    std::tie(n1, premise) = poly::parseRawSystem(readFile(p1File));
    std::tie(n2, target) = poly::parseRawSystem(readFile(p2File));
    cert = poly::parseCert(readFile(certFile));
  } catch (const std::exception &e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (n1 != n2) {
    std::cerr << "premise and target range over different variable counts ("
              << n1 << " vs " << n2 << ")\n";
    return 2;
  }
  poly::CheckOutcome out = poly::checkCert(premise, target, cert);
  if (out.ok) {
    std::cout << "Value\n";
    return 0;
  }
  std::cout << "Error: " << out.reason << "\n";
  return 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"certified polyhedra toolkit: replay traces, check inclusion "
               "certificates, generate synthetic traces"};
  app.require_subcommand(1);

  std::string traceFile, statsOut;
  bool checkCerts = false, oracle = false;
  CLI::App *replay =
      app.add_subcommand("replay", "parse and execute a trace file");
  replay->add_option("file", traceFile, "trace file")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_flag("--check-certs", checkCerts,
                   "run every emitted certificate through the independent "
                   "checker");
  replay->add_flag("--oracle", oracle,
                   "cross-check results against brute-force references "
                   "(small instances only; larger ones are skipped with a "
                   "notice)");
  replay->add_option("--stats", statsOut,
                     "write per-op records and the bucket aggregation as "
                     "JSON to this file");

  std::string p1File, p2File, certFile;
  CLI::App *check = app.add_subcommand(
      "check", "verify an inclusion certificate against two constraint "
               "systems, without the operator implementations");
  check->add_option("p1", p1File, "premise system file: poly N { ... }")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("p2", p2File, "target system file: poly N { ... }")
      ->required()
      ->check(CLI::ExistingFile);
  check
      ->add_option("cert", certFile,
                   "certificate file: incl { ... } or empty [ ... ]")
      ->required()
      ->check(CLI::ExistingFile);

  std::uint64_t seed = 1;
  std::string profile = "box";
  CLI::App *gen =
      app.add_subcommand("gen", "write a synthetic trace to stdout");
  gen->add_option("--seed", seed, "generator seed (default 1)");
  gen->add_option("--profile", profile,
                  "box | octagon | loop-chain (default box)");

  CLI11_PARSE(app, argc, argv);

  if (replay->parsed())
    return runReplay(traceFile, checkCerts, oracle, statsOut);
  if (check->parsed())
    return runCheck(p1File, p2File, certFile);
  if (gen->parsed()) {
    auto p = poly::trace::profileFromName(profile);
    if (!p) {
      std::cerr << "unknown profile '" << profile
                << "' (expected box, octagon, or loop-chain)\n";
      return 2;
    }
    std::cout << poly::trace::gen(seed, *p);
    return 0;
  }
  return 2;
}
