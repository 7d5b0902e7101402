#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "priorsense/experiments.hpp"
#include "priorsense/model_space.hpp"
#include "priorsense/sim_engine.hpp"

namespace priorsense {

// Instance documents:
// {"K":2,"models":[{"actions":[{"support":[...],"probs":[...]}, ...]}, ...],
//  "prior":[...],"true_model":0,"delta":0.05}
std::string instance_to_json(const InstanceBundle& bundle);
InstanceBundle instance_from_json(const std::string& text);

/// Loads an ExperimentConfig from JSON; missing keys keep the case defaults.
ExperimentConfig config_from_json(const std::string& text);

/// Round-trip formatting for doubles in CSV output.
std::string format_double(double v);

/// Header: t,action,reward,gap,p_theta1 (p_theta1 empty without snapshots).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Header: instance_id,p,N,T,runs,mean_regret,std_error
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

/// Header: case,N,points,slope,intercept,r_squared
void write_fit_csv(std::ostream& out, PriorCase which, std::span<const ScalingFit> fits);

/// Two-panel figure: poor priors against sqrt(1/p) on the left, good priors
/// against sqrt(1-p) on the right. Either result may be absent.
std::string render_scaling_svg(const ScalingResult* poor, const ScalingResult* good);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace priorsense
