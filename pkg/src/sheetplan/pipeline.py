"""End-to-end scenario runs: optimize, plan and simulate along a corridor.

For each obstacle in centerline order: optimize the formation shape, transit
along the corridor to the maneuver start, morph into the new shape in place,
then execute the crossing (or bypass) maneuver. The object's position is
re-solved from the cable model at every sample, and the whole run is
deterministic for a fixed scenario.

Robot offsets are carried in world orientation throughout; maneuvers apply
their rotation on top and fold it into the offsets when they finish, so the
sampled robot paths stay continuous across segment boundaries.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .equilibrium import solve_equilibrium
from .errors import IoError, PipelineInfeasible, SheetPlanError
from .geometry import Formation
from .optimizer import optimize_formation
from .planner import (
    PlanTimeline,
    _bypass_profile,
    _crossing_schedule,
    _rot,
    crossing_pose,
    wrap_angle,
)
from .scenario import Scenario

FMT = "%.9g"


@dataclass(frozen=True)
class RunReport:
    """Concatenated timeline plus derived safety and tracking metrics."""

    scenario_name: str
    timeline: PlanTimeline
    obstacle_modes: tuple
    crossing_angles: tuple             # per obstacle: (theta1, theta2, exit_angle) or None
    min_vertical_clearance: float      # min (z_o - z_obs) while over an obstacle
    min_horizontal_clearance: float    # min robot distance to any obstacle disc
    robot_path_lengths: np.ndarray
    centerline_rmse: float
    final_object: np.ndarray
    goal: np.ndarray
    dt: float


def _translate_runner(xy_from, xy_to, theta, offsets, v):
    """Rigid straight-line translation; offsets already world-oriented."""
    xy_from = np.asarray(xy_from, dtype=float)
    xy_to = np.asarray(xy_to, dtype=float)
    delta = xy_to - xy_from
    dist = float(np.linalg.norm(delta))
    duration = dist / v
    direction = delta / dist if dist > 0 else np.zeros(2)

    def fn(t):
        xy = xy_from + direction * (v * t)
        return xy, theta, xy + offsets

    return duration, fn


def _morph_runner(xy, theta, offsets_from, offsets_to, v):
    """In-place shape change at bounded robot speed (no rotation)."""
    xy = np.asarray(xy, dtype=float)
    disp = float(np.max(np.linalg.norm(offsets_to - offsets_from, axis=1)))
    duration = disp / v

    def fn(t):
        frac = min(t / duration, 1.0) if duration > 0 else 1.0
        offs = offsets_from + frac * (offsets_to - offsets_from)
        return xy, theta, xy + offs

    return duration, fn


def _crossing_runner(schedule, x_start, track_y, center, psi, theta_acc, offsets):
    """Four-step crossing maneuver; rotation applied on top of world offsets."""
    rot_w = _rot(psi)

    def fn(t):
        x, dtheta = crossing_pose(schedule, t)
        xy = center + rot_w @ np.array([x_start + x, track_y])
        return xy, theta_acc + dtheta, xy + offsets @ _rot(dtheta).T

    return schedule.T4, fn


def _bypass_runner(obstacle, psi, theta_acc, offsets, along, shift, v, r_max):
    rot_w = _rot(psi)
    x0 = -(along + shift + r_max)
    t_diag = float(np.hypot(shift, shift)) / v
    t_pass = 2.0 * along / v
    total = 2 * t_diag + t_pass
    x_end = float(x0 + 2 * shift + t_pass * v)

    def fn(t):
        if t <= t_diag:
            frac = t / t_diag if t_diag > 0 else 1.0
            loc = np.array([x0 + frac * shift, frac * shift])
        elif t <= t_diag + t_pass:
            loc = np.array([x0 + shift + (t - t_diag) * v, shift])
        elif t <= total:
            frac = (t - t_diag - t_pass) / t_diag if t_diag > 0 else 1.0
            loc = np.array([x0 + shift + t_pass * v + frac * shift, (1 - frac) * shift])
        else:
            loc = np.array([x_end, 0.0])
        xy = obstacle.center + rot_w @ loc
        return xy, theta_acc, xy + offsets

    return total, fn, x0, x_end


def _transit_runners(xy_from, xy_to, corridor, theta, offsets, v):
    """Straight transit legs routed through intermediate corridor corners."""
    s_from = corridor.project(xy_from)
    s_to = corridor.project(xy_to)
    cum = np.concatenate([[0.0], np.cumsum(corridor.segment_lengths)])
    corners = [
        corridor.points[k]
        for k in range(1, len(corridor.points) - 1)
        if s_from + 1e-9 < cum[k] < s_to - 1e-9
    ]
    route = [np.asarray(xy_from, dtype=float)] + corners + [np.asarray(xy_to, dtype=float)]
    runners = []
    for a, b in zip(route, route[1:]):
        if np.linalg.norm(np.asarray(b) - np.asarray(a)) < 1e-12:
            continue
        runners.append(_translate_runner(a, b, theta, offsets, v))
    return runners


def run_pipeline(scenario: Scenario) -> RunReport:
    """Run the optimize/plan/simulate pipeline over a whole scenario.

    Raises PipelineInfeasible naming the first obstacle that admits neither
    a crossing nor a bypassing plan.
    """
    corridor = scenario.corridor
    v = scenario.speed
    dt = scenario.dt
    segments = []      # (duration, fn(t) -> (xy, theta, robots))
    modes = []
    angles = []

    layout = scenario.initial_formation.layout
    offsets = (
        scenario.initial_formation.robot_positions
        - scenario.initial_formation.centroid()
    )
    centroid = scenario.initial_formation.centroid()
    theta_acc = 0.0

    for index, obstacle in enumerate(scenario.obstacles):
        s_obs = corridor.project(obstacle.center)
        approach = corridor.direction_at(max(s_obs - 1e-9, 0.0))
        depart = corridor.direction_at(min(s_obs + 1e-6, corridor.length))
        w_convex = corridor.width_at(s_obs)
        psi = float(np.arctan2(approach[1], approach[0]))
        current = Formation(centroid + offsets, layout)
        try:
            solution = optimize_formation(
                current, obstacle, w_convex, scenario.weights, scenario.safety
            )
        except SheetPlanError as exc:
            raise PipelineInfeasible(index, f"obstacle {index}: {exc}") from exc
        modes.append("crossed" if solution.mode == "crossing" else "bypassed")
        new_offsets = (
            solution.formation.robot_positions - solution.formation.centroid()
        )
        r_max = float(np.max(np.linalg.norm(new_offsets, axis=1)))

        if solution.mode == "crossing":
            schedule, x_start, x_clear, track_y = _crossing_schedule(
                solution, obstacle, scenario.safety, approach, depart,
                v, scenario.omega, dt,
            )
            start_xy = obstacle.center + _rot(psi) @ np.array([x_start, track_y])
            segments.extend(
                _transit_runners(centroid, start_xy, corridor, theta_acc, offsets, v)
            )
            segments.append(_morph_runner(start_xy, theta_acc, offsets, new_offsets, v))
            segments.append(
                _crossing_runner(schedule, x_start, track_y, obstacle.center, psi,
                                 theta_acc, new_offsets)
            )
            turn = schedule.theta1 + schedule.theta2
            n_out_world = _rot(turn) @ schedule.n_out
            exit_angle = wrap_angle(
                float(np.arctan2(n_out_world[1], n_out_world[0]))
                - float(np.arctan2(depart[1], depart[0]))
            )
            angles.append((schedule.theta1, schedule.theta2, exit_angle))
            theta_acc += turn
            offsets = new_offsets @ _rot(turn).T
            centroid = obstacle.center + _rot(psi) @ np.array([x_clear, track_y])
        else:
            try:
                along, shift = _bypass_profile(
                    solution, obstacle, w_convex, scenario.safety
                )
            except SheetPlanError as exc:
                raise PipelineInfeasible(index, f"obstacle {index}: {exc}") from exc
            total, fn, x0, x_end = _bypass_runner(
                obstacle, psi, theta_acc, new_offsets, along, shift, v, r_max
            )
            start_xy = obstacle.center + _rot(psi) @ np.array([x0, 0.0])
            segments.extend(
                _transit_runners(centroid, start_xy, corridor, theta_acc, offsets, v)
            )
            segments.append(_morph_runner(start_xy, theta_acc, offsets, new_offsets, v))
            segments.append((total, fn))
            angles.append(None)
            offsets = new_offsets
            centroid = obstacle.center + _rot(psi) @ np.array([x_end, 0.0])

    # final transit: land the object on the goal
    placed = Formation(centroid + offsets, layout)
    eq = solve_equilibrium(placed, fast=True)
    object_offset = eq.horizontal - centroid
    target = np.asarray(scenario.goal, dtype=float) - object_offset
    segments.extend(_transit_runners(centroid, target, corridor, theta_acc, offsets, v))

    timeline = _sample_segments(segments, layout, dt)
    return _build_report(scenario, timeline, modes, angles)


def _sample_segments(segments, layout, dt) -> PlanTimeline:
    total = sum(d for d, _ in segments)
    count = int(np.ceil(total / dt - 1e-9)) + 1
    times = np.arange(count) * dt
    n = layout.n
    poses = np.zeros((count, 3))
    robots = np.zeros((count, n, 2))
    objects = np.zeros((count, 3))
    contacts = np.zeros((count, 2))
    taut = np.zeros((count, n), dtype=bool)
    for k, t in enumerate(times):
        t_rel = min(float(t), total)
        xy, theta, robot_pts = None, 0.0, None
        for i, (duration, fn) in enumerate(segments):
            if t_rel <= duration + 1e-12 or i == len(segments) - 1:
                xy, theta, robot_pts = fn(min(t_rel, duration))
                break
            t_rel -= duration
        poses[k] = [xy[0], xy[1], theta]
        robots[k] = robot_pts
        placed = Formation(robot_pts, layout)
        eq = solve_equilibrium(placed)
        objects[k] = eq.world_position
        contacts[k] = eq.sheet_contact
        taut[k] = [c.taut for c in eq.cables]
    return PlanTimeline(
        times=times, poses=poses, robots=robots, objects=objects,
        contacts=contacts, taut=taut, mode="pipeline", schedule=None,
    )


def _build_report(scenario, timeline, modes, angles) -> RunReport:
    min_vert = np.inf
    min_horiz = np.inf
    for index, obstacle in enumerate(scenario.obstacles):
        horiz = np.linalg.norm(timeline.objects[:, :2] - obstacle.center, axis=1)
        over = horiz <= obstacle.radius + scenario.safety.delta_r
        if np.any(over):
            vert = float(np.min(timeline.objects[over, 2]) - obstacle.z_obs)
            min_vert = min(min_vert, vert)
            if modes[index] == "crossed" and vert < scenario.safety.z_safe - 1e-9:
                raise PipelineInfeasible(
                    index, f"object clearance {vert:.4f} below z_safe over obstacle {index}"
                )
        robot_d = np.linalg.norm(
            timeline.robots - obstacle.center[None, None, :], axis=2
        )
        min_horiz = min(min_horiz, float(np.min(robot_d) - obstacle.radius))
    if scenario.obstacles and min_horiz < scenario.safety.delta_r - 1e-9:
        raise PipelineInfeasible(0, f"robot clearance {min_horiz:.4f} below delta_r")
    path_lengths = np.sum(
        np.linalg.norm(np.diff(timeline.robots, axis=0), axis=2), axis=0
    )
    deviations = np.array([
        scenario.corridor.distance_to(p) for p in timeline.objects[:, :2]
    ])
    rmse = float(np.sqrt(np.mean(deviations**2)))
    final_object = timeline.objects[-1]
    if np.linalg.norm(final_object[:2] - scenario.goal) > 2.0 * scenario.speed * scenario.dt:
        raise PipelineInfeasible(
            -1, f"final object {final_object[:2]} missed goal {scenario.goal}"
        )
    return RunReport(
        scenario_name=scenario.name,
        timeline=timeline,
        obstacle_modes=tuple(modes),
        crossing_angles=tuple(angles),
        min_vertical_clearance=min_vert,
        min_horizontal_clearance=min_horiz,
        robot_path_lengths=path_lengths,
        centerline_rmse=rmse,
        final_object=final_object,
        goal=np.asarray(scenario.goal, dtype=float),
        dt=scenario.dt,
    )


# ------------------------------------------------------------------ export
def _fmt_row(values):
    return ",".join(FMT % val for val in values)


def export_report(report: RunReport, out_dir) -> list:
    """Write trajectory table, metrics summary and plot series files.

    trajectory.csv columns: t, per-robot x/y, object x/y/z, sheet contact
    x/y, formation rotation theta, then one taut flag per cable. All numbers
    carry 9 significant digits so runs diff cleanly.
    """
    tl = report.timeline
    n = tl.robots.shape[1] if len(tl) else 0
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = []

        traj = os.path.join(out_dir, "trajectory.csv")
        with open(traj, "w", encoding="utf-8") as fh:
            cols = ["t"]
            for i in range(n):
                cols += [f"x_r{i + 1}", f"y_r{i + 1}"]
            cols += ["x_o", "y_o", "z_o", "x_vo", "y_vo", "theta"]
            cols += [f"taut_{i + 1}" for i in range(n)]
            fh.write(",".join(cols) + "\n")
            for k in range(len(tl)):
                row = [tl.times[k]]
                for i in range(n):
                    row += [tl.robots[k, i, 0], tl.robots[k, i, 1]]
                row += list(tl.objects[k]) + list(tl.contacts[k]) + [tl.poses[k, 2]]
                row += [int(b) for b in tl.taut[k]]
                fh.write(_fmt_row(row) + "\n")
        paths.append(traj)

        metrics = os.path.join(out_dir, "metrics.txt")
        with open(metrics, "w", encoding="utf-8") as fh:
            fh.write(f"scenario = {report.scenario_name}\n")
            fh.write(f"samples = {len(tl)}\n")
            duration = tl.times[-1] if len(tl) else 0.0
            fh.write("duration = " + FMT % duration + "\n")
            fh.write("obstacle_modes = " + " ".join(report.obstacle_modes) + "\n")
            for i, ang in enumerate(report.crossing_angles):
                if ang is None:
                    continue
                t1, t2, exit_angle = (np.rad2deg(a) for a in ang)
                fh.write(
                    f"obstacle_{i + 1}_angles_deg = "
                    + _fmt_row([t1, t2, exit_angle]) + "\n"
                )
            fh.write(
                "min_object_vertical_clearance = "
                + FMT % report.min_vertical_clearance + "\n"
            )
            fh.write(
                "min_robot_horizontal_clearance = "
                + FMT % report.min_horizontal_clearance + "\n"
            )
            for i, length in enumerate(report.robot_path_lengths):
                fh.write(f"robot_{i + 1}_path_length = " + FMT % length + "\n")
            fh.write("object_centerline_rmse = " + FMT % report.centerline_rmse + "\n")
            fh.write("final_object = " + _fmt_row(report.final_object) + "\n")
            fh.write("goal = " + _fmt_row(report.goal) + "\n")
        paths.append(metrics)

        height = os.path.join(out_dir, "height_profile.csv")
        with open(height, "w", encoding="utf-8") as fh:
            fh.write("t,z_o\n")
            for k in range(len(tl)):
                fh.write(_fmt_row([tl.times[k], tl.objects[k, 2]]) + "\n")
        paths.append(height)

        pairs = os.path.join(out_dir, "pairwise_distances.csv")
        with open(pairs, "w", encoding="utf-8") as fh:
            labels = [f"d_{i + 1}_{j + 1}" for i in range(n) for j in range(i + 1, n)]
            fh.write(",".join(["t"] + labels) + "\n")
            for k in range(len(tl)):
                row = [tl.times[k]]
                for i in range(n):
                    for j in range(i + 1, n):
                        row.append(float(np.linalg.norm(tl.robots[k, i] - tl.robots[k, j])))
                fh.write(_fmt_row(row) + "\n")
        paths.append(pairs)
        return paths
    except OSError as exc:
        raise IoError(f"failed writing report to {out_dir}: {exc}") from exc
