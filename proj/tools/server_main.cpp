// tdri-server: the HTTP service with toy or remote backends.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdri/core/error.hpp"
#include "tdri/service/engine.hpp"
#include "tdri/service/http_api.hpp"
#include "tdri/service/settings.hpp"

namespace {

tdri::service::HttpApi* g_api = nullptr;

void on_signal(int) {
  if (g_api) g_api->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TDRI refinement service"};
  std::string config_path;
  std::optional<int> port;
  std::string data_dir;
  std::string backend_url;
  std::string host;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--port", port, "listen port (0 picks one)");
  app.add_option("--host", host, "listen address");
  app.add_option("--data-dir", data_dir, "snapshot and vote-log directory");
  app.add_option("--backend-url", backend_url, "remote backend base URL");
  app.add_option("--set", sets, "extra key=value override");
  CLI11_PARSE(app, argc, argv);

  try {
    tdri::service::KeyValues cli;
    if (port) cli.emplace_back("port", std::to_string(*port));
    if (!host.empty()) cli.emplace_back("host", host);
    if (!data_dir.empty()) cli.emplace_back("data_dir", data_dir);
    if (!backend_url.empty()) cli.emplace_back("backend_url", backend_url);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "--set expects key=value, got '" << kv << "'\n";
        return 2;
      }
      cli.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }

    std::optional<std::filesystem::path> file;
    if (!config_path.empty()) file = config_path;
    const auto settings = tdri::service::resolve_settings(file, tdri::service::process_env(), cli);

    tdri::service::Engine engine(tdri::service::engine_options(settings));
    tdri::service::ApiOptions api_options{settings.api_token, {settings.backend_token}};
    tdri::service::HttpApi api(engine, api_options);
    const int bound = api.bind(settings.host, settings.port);
    std::cout << "listening on " << settings.host << ":" << bound << " (data in "
              << settings.data_dir.string() << ", "
              << (settings.backend_url.empty() ? "toy backends" : "remote backends") << ")" << std::endl;

    g_api = &api;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    api.serve();
    g_api = nullptr;
  } catch (const tdri::Error& e) {
    std::cerr << "error: " << tdri::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
