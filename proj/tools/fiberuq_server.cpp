// HTTP service for the trait-drawing UI. Configuration comes from flags or
// the matching FIBERUQ_* environment variables.

#include <pthread.h>

#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "fiberuq/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fiberuq-server: HTTP API for datasets, probability jobs and volumes"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "fiberuq-data";
  unsigned job_threads = 0;
  std::size_t max_upload_mb = 1024;
  app.add_option("--bind", host, "bind address")->envname("FIBERUQ_BIND");
  app.add_option("--port", port, "port")->envname("FIBERUQ_PORT")->check(CLI::Range(0, 65535));
  app.add_option("--data-dir", data_dir, "directory for uploads and volumes")->envname("FIBERUQ_DATA_DIR");
  app.add_option("--job-threads", job_threads, "vertex threads per job (0 = all cores)")->envname("FIBERUQ_JOB_THREADS");
  app.add_option("--max-upload-mb", max_upload_mb, "request size limit")->envname("FIBERUQ_MAX_UPLOAD_MB");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  // SIGINT/SIGTERM are taken by a waiter thread instead of a handler, so
  // stopping the server happens outside signal context.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  try {
    fiberuq::Service service({data_dir, job_threads, max_upload_mb << 20});
    httplib::Server server;
    service.install(server);
    int bound = port;
    if (port == 0) {
      bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
      bound = -1;
    }
    if (bound < 0) {
      std::cerr << "error: cannot bind " << host << ":" << port << "\n";
      return 1;
    }
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&stop_signals, &sig);
      server.stop();
    });
    waiter.detach();
    std::cout << "listening on " << host << ":" << bound << std::endl;
    server.listen_after_bind();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
