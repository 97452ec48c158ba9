"""Fused plant evaluation for the simulation hot loop.

Mathematically identical to composing the modular kinematics, contact law and
equations of motion (a regression test pins the two paths together). The
inner math is deliberately scalar: at this problem size interpreter-level
numpy dispatch costs more than the arithmetic itself, and the 2 kHz step-rate
budget is only met by evaluating the four-substep derivative on plain floats.
"""

from __future__ import annotations

from math import cos, exp, sin

import numpy as np

from .contact import GroundParams, GrfSet
from .dynamics import ModelParams, Wrench


class Plant:
    """Precomputed constants plus fused derivative / contact-truth evaluation."""

    def __init__(self, model: ModelParams, ground: GroundParams):
        self.model = model
        self.ground = ground
        self._m = float(model.mass)
        self._inertia = [[float(v) for v in row] for row in model.inertia]
        self._inertia_inv = [[float(v) for v in row] for row in np.linalg.inv(model.inertia)]
        self._hips = [[float(v) for v in row] for row in model.hip_offsets]
        g = model.gravity
        self._weight = (self._m * float(g[0]), self._m * float(g[1]), self._m * float(g[2]))

    def _eval(self, xl: list[float]) -> tuple[list, list, list, list]:
        """Leg chain and contact law on scalars.

        Returns per-leg body-frame foot offsets, world foot positions, world
        foot velocities, and world contact forces (lists of 3-lists).
        """
        g = self.ground
        k_n, d_n = g.k_normal, g.d_normal
        mu_c, mu_s, mu_v = g.mu_coulomb, g.mu_static, g.mu_viscous
        inv_vs2 = 1.0 / (g.stribeck_velocity * g.stribeck_velocity)
        ground_z = g.height

        px, py, pz = xl[0], xl[1], xl[2]
        r00, r01, r02, r10, r11, r12, r20, r21, r22 = xl[3:12]
        vx, vy, vz = xl[12], xl[13], xl[14]
        wx, wy, wz = xl[15], xl[16], xl[17]

        offsets, positions, velocities, forces = [], [], [], []
        for i in range(4):
            qb = 18 + 3 * i
            gam, phi, l = xl[qb], xl[qb + 1], xl[qb + 2]
            dgam, dphi, dl = xl[qb + 12], xl[qb + 13], xl[qb + 14]
            cg, sg, cp, sp = cos(gam), sin(gam), cos(phi), sin(phi)
            lcg, lsg = l * cg, l * sg
            hip = self._hips[i]

            # body-frame foot offset and its rate (joint motion + omega x r)
            ox = hip[0] - lcg * sp
            oy = hip[1] + lsg
            oz = hip[2] - lcg * cp
            dux = lsg * sp * dgam - lcg * cp * dphi - cg * sp * dl + wy * oz - wz * oy
            duy = lcg * dgam + sg * dl + wz * ox - wx * oz
            duz = lsg * cp * dgam + lcg * sp * dphi - cg * cp * dl + wx * oy - wy * ox

            fx_w = px + r00 * ox + r01 * oy + r02 * oz
            fy_w = py + r10 * ox + r11 * oy + r12 * oz
            fz_w = pz + r20 * ox + r21 * oy + r22 * oz
            vfx = vx + r00 * dux + r01 * duy + r02 * duz
            vfy = vy + r10 * dux + r11 * duy + r12 * duz
            vfz = vz + r20 * dux + r21 * duy + r22 * duz

            if fz_w - ground_z <= 0.0:
                uz = -k_n * (fz_w - ground_z) - d_n * vfz
                if uz < 0.0:
                    uz = 0.0
                s = mu_c - (mu_c - mu_s) * exp(-vfx * vfx * inv_vs2)
                ux = -s * uz * ((vfx > 0.0) - (vfx < 0.0)) - mu_v * vfx
                s = mu_c - (mu_c - mu_s) * exp(-vfy * vfy * inv_vs2)
                uy = -s * uz * ((vfy > 0.0) - (vfy < 0.0)) - mu_v * vfy
                forces.append([ux, uy, uz])
            else:
                forces.append([0.0, 0.0, 0.0])

            offsets.append([ox, oy, oz])
            positions.append([fx_w, fy_w, fz_w])
            velocities.append([vfx, vfy, vfz])
        return offsets, positions, velocities, forces

    def derivative(self, x: np.ndarray, u_t: Wrench, u_L: np.ndarray) -> np.ndarray:
        xl = x.tolist()
        offsets, _, _, forces = self._eval(xl)
        return np.array(self._rhs(xl, offsets, forces, u_t, u_L.tolist()))

    def _rhs(
        self, xl: list[float], offsets: list, forces: list, u_t: Wrench, u_Ll: list[float]
    ) -> list[float]:
        r00, r01, r02, r10, r11, r12, r20, r21, r22 = xl[3:12]
        wx, wy, wz = xl[15], xl[16], xl[17]

        # total world force and body moment from the feet
        Fx, Fy, Fz = self._weight
        mx = my = mz = 0.0
        for i in range(4):
            fw = forces[i]
            if fw[2] != 0.0 or fw[0] != 0.0 or fw[1] != 0.0:
                Fx += fw[0]
                Fy += fw[1]
                Fz += fw[2]
                # body-frame force, then r x f about the COM
                fbx = r00 * fw[0] + r10 * fw[1] + r20 * fw[2]
                fby = r01 * fw[0] + r11 * fw[1] + r21 * fw[2]
                fbz = r02 * fw[0] + r12 * fw[1] + r22 * fw[2]
                o = offsets[i]
                mx += o[1] * fbz - o[2] * fby
                my += o[2] * fbx - o[0] * fbz
                mz += o[0] * fby - o[1] * fbx

        tf, tm = u_t.force, u_t.moment
        if u_t.frame == "body":
            Fx += r00 * tf[0] + r01 * tf[1] + r02 * tf[2]
            Fy += r10 * tf[0] + r11 * tf[1] + r12 * tf[2]
            Fz += r20 * tf[0] + r21 * tf[1] + r22 * tf[2]
            mx += tm[0]
            my += tm[1]
            mz += tm[2]
        else:
            Fx += tf[0]
            Fy += tf[1]
            Fz += tf[2]
            mx += r00 * tm[0] + r10 * tm[1] + r20 * tm[2]
            my += r01 * tm[0] + r11 * tm[1] + r21 * tm[2]
            mz += r02 * tm[0] + r12 * tm[1] + r22 * tm[2]

        I = self._inertia
        Iwx = I[0][0] * wx + I[0][1] * wy + I[0][2] * wz
        Iwy = I[1][0] * wx + I[1][1] * wy + I[1][2] * wz
        Iwz = I[2][0] * wx + I[2][1] * wy + I[2][2] * wz
        mx -= wy * Iwz - wz * Iwy
        my -= wz * Iwx - wx * Iwz
        mz -= wx * Iwy - wy * Iwx
        Ii = self._inertia_inv
        inv_m = 1.0 / self._m

        return [
            xl[12], xl[13], xl[14],
            # dR = R [w]x
            r01 * wz - r02 * wy, r02 * wx - r00 * wz, r00 * wy - r01 * wx,
            r11 * wz - r12 * wy, r12 * wx - r10 * wz, r10 * wy - r11 * wx,
            r21 * wz - r22 * wy, r22 * wx - r20 * wz, r20 * wy - r21 * wx,
            Fx * inv_m, Fy * inv_m, Fz * inv_m,
            Ii[0][0] * mx + Ii[0][1] * my + Ii[0][2] * mz,
            Ii[1][0] * mx + Ii[1][1] * my + Ii[1][2] * mz,
            Ii[2][0] * mx + Ii[2][1] * my + Ii[2][2] * mz,
            xl[30], xl[31], xl[32], xl[33], xl[34], xl[35],
            xl[36], xl[37], xl[38], xl[39], xl[40], xl[41],
            u_Ll[0], u_Ll[1], u_Ll[2], u_Ll[3], u_Ll[4], u_Ll[5],
            u_Ll[6], u_Ll[7], u_Ll[8], u_Ll[9], u_Ll[10], u_Ll[11],
        ]

    def make_f(self, u_t: Wrench, u_L: np.ndarray):
        u_Ll = u_L.tolist()

        def f(x: np.ndarray) -> np.ndarray:
            xl = x.tolist()
            offsets, _, _, forces = self._eval(xl)
            return np.array(self._rhs(xl, offsets, forces, u_t, u_Ll))

        return f

    def truth(self, x: np.ndarray) -> tuple[GrfSet, np.ndarray, np.ndarray]:
        """Contact truth at a state: (GrfSet, foot world positions, generalized GRF)."""
        xl = x.tolist()
        offsets, positions, _, forces = self._eval(xl)
        r00, r01, r02, r10, r11, r12, r20, r21, r22 = xl[3:12]
        Fx = Fy = Fz = mx = my = mz = 0.0
        contact = np.zeros(4, dtype=bool)
        pen = np.zeros(4)
        for i in range(4):
            fw = forces[i]
            contact[i] = positions[i][2] - self.ground.height <= 0.0
            if contact[i]:
                pen[i] = self.ground.height - positions[i][2]
            Fx += fw[0]
            Fy += fw[1]
            Fz += fw[2]
            fbx = r00 * fw[0] + r10 * fw[1] + r20 * fw[2]
            fby = r01 * fw[0] + r11 * fw[1] + r21 * fw[2]
            fbz = r02 * fw[0] + r12 * fw[1] + r22 * fw[2]
            o = offsets[i]
            mx += o[1] * fbz - o[2] * fby
            my += o[2] * fbx - o[0] * fbz
            mz += o[0] * fby - o[1] * fbx
        grf = GrfSet(forces=np.array(forces), in_contact=contact, penetration=pen)
        return grf, np.array(positions), np.array([Fx, Fy, Fz, mx, my, mz])
