#include "isp/telemetry.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace isp {

namespace {

constexpr const char* kHeaderComment = "# isp telemetry v1";
constexpr const char* kColumns =
    "t,psi,theta,wb_x,wb_y,wb_z,wp_x,wp_y,wp_z,ytc,yte,ptc,pte,"
    "rate_cmd_y,rate_cmd_z,v_yaw,v_pitch,detect";

void append_number(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    line += buf;
}

} // namespace

void TelemetryLog::reserve(std::size_t n) {
    for (auto* series :
         {&t, &psi, &theta, &psi_meas, &theta_meas, &wb_x, &wb_y, &wb_z, &wg_x, &wg_y, &wg_z,
          &wp_x, &wp_y, &wp_z, &wp_meas_y, &wp_meas_z, &ytc, &yte, &ptc, &pte, &rate_cmd_y,
          &rate_cmd_z, &v_yaw, &v_pitch, &detect}) {
        series->reserve(n);
    }
}

void save_telemetry_csv(const TelemetryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("save_telemetry_csv: cannot open " + path);
    }
    out << kHeaderComment << "\n" << kColumns << "\n";
    std::string line;
    for (std::size_t i = 0; i < log.size(); ++i) {
        line.clear();
        const double row[] = {log.t[i],     log.psi[i],       log.theta[i],      log.wb_x[i],
                              log.wb_y[i],  log.wb_z[i],      log.wp_x[i],       log.wp_y[i],
                              log.wp_z[i],  log.ytc[i],       log.yte[i],        log.ptc[i],
                              log.pte[i],   log.rate_cmd_y[i], log.rate_cmd_z[i], log.v_yaw[i],
                              log.v_pitch[i], log.detect[i]};
        for (std::size_t c = 0; c < sizeof(row) / sizeof(row[0]); ++c) {
            if (c > 0) {
                line += ',';
            }
            append_number(line, row[c]);
        }
        line += '\n';
        out << line;
    }
}

TelemetryLog load_telemetry_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_telemetry_csv: cannot open " + path);
    }
    TelemetryLog log;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != kColumns) {
                throw std::runtime_error("load_telemetry_csv: unexpected column layout");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        double v[18];
        char comma;
        for (int c = 0; c < 18; ++c) {
            if (c > 0) {
                row >> comma;
            }
            if (!(row >> v[c])) {
                throw std::runtime_error("load_telemetry_csv: malformed row: " + line);
            }
        }
        log.t.push_back(v[0]);
        log.psi.push_back(v[1]);
        log.theta.push_back(v[2]);
        log.wb_x.push_back(v[3]);
        log.wb_y.push_back(v[4]);
        log.wb_z.push_back(v[5]);
        log.wp_x.push_back(v[6]);
        log.wp_y.push_back(v[7]);
        log.wp_z.push_back(v[8]);
        log.ytc.push_back(v[9]);
        log.yte.push_back(v[10]);
        log.ptc.push_back(v[11]);
        log.pte.push_back(v[12]);
        log.rate_cmd_y.push_back(v[13]);
        log.rate_cmd_z.push_back(v[14]);
        log.v_yaw.push_back(v[15]);
        log.v_pitch.push_back(v[16]);
        log.detect.push_back(v[17]);
    }
    return log;
}

} // namespace isp
