import logging

import numpy as np
from scipy.linalg import block_diag

from .domain import GraspRates

logger = logging.getLogger(__name__)

SOFT_FINGER_SELECTION = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
    ],
    dtype=float,
)


def link_transform(link):
    """Rot(z, theta) Trans(z, d) Trans(x, a) Rot(x, alpha) in closed form."""
    ct, st = np.cos(link.theta), np.sin(link.theta)
    ca, sa = np.cos(link.alpha), np.sin(link.alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, link.a * ct],
            [st, ct * ca, -ct * sa, link.a * st],
            [0.0, sa, ca, link.d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def frame_transforms(chain, angles=None):
    """World poses of frames {0} .. {t}; frame {0} is the chain base."""
    if angles is not None:
        chain = chain.with_angles(angles)
    frames = [np.array(chain.base)]
    for link in chain.links:
        frames.append(frames[-1] @ link_transform(link))
    return frames


def forward_kinematics(chain, angles=None):
    """Fingertip pose base · prod_i T_i(theta_i)."""
    return frame_transforms(chain, angles)[-1]


def frame_origins(chain, angles=None):
    return np.array([frame[:3, 3] for frame in frame_transforms(chain, angles)])


def jacobian(chain, angles=None):
    """
    6 x t velocity Jacobian of the fingertip, rows (v; omega).

    Joint i turns about the z axis of frame {i}, so its column is
    (z_i x (p_tip - p_i); z_i).
    """
    frames = frame_transforms(chain, angles)
    tip = frames[-1][:3, 3]
    columns = []
    for frame in frames[:-1]:
        axis, origin = frame[:3, 2], frame[:3, 3]
        columns.append(np.concatenate([np.cross(axis, tip - origin), axis]))
    return np.column_stack(columns)


def _pose_twist(before, after, step):
    linear = (after[:3, 3] - before[:3, 3]) / step
    delta = after[:3, :3] @ before[:3, :3].T
    skew = (delta - delta.T) / 2.0
    angular = np.array([skew[2, 1], skew[0, 2], skew[1, 0]]) / step
    return np.concatenate([linear, angular])


def numeric_jacobian(chain, angles=None, step=1e-6):
    """Central finite differences of forward_kinematics."""
    angles = chain.angles if angles is None else np.asarray(angles, dtype=float)
    columns = []
    for i in range(len(angles)):
        offset = np.zeros_like(angles)
        offset[i] = step
        before = forward_kinematics(chain, angles - offset)
        after = forward_kinematics(chain, angles + offset)
        columns.append(_pose_twist(before, after, 2.0 * step))
    return np.column_stack(columns)


def joint_torques(chain, tip_force, angles=None):
    """
    tau = J^T F.

    ``tip_force`` is either a 3-vector force (N) or a 6-vector wrench
    (force; moment).
    """
    force = np.asarray(tip_force, dtype=float).reshape(-1)
    full = jacobian(chain, angles)
    if force.shape == (3,):
        return full[:3].T @ force
    if force.shape == (6,):
        return full.T @ force
    raise ValueError("Tip force must have 3 or 6 components.")


def contact_frame(normal):
    """(n, t1, t2): tangents by Gram-Schmidt on the least aligned world axis."""
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    seed = np.eye(3)[int(np.argmin(np.abs(n)))]
    t1 = seed - (seed @ n) * n
    t1 /= np.linalg.norm(t1)
    return n, t1, np.cross(n, t1)


def contact_grasp_block(contact, center=None):
    """6 x 4 soft-finger block: three contact forces plus the normal moment."""
    n, t1, t2 = contact_frame(contact.normal)
    lever = contact.point - (np.zeros(3) if center is None else np.asarray(center))
    forces = np.column_stack([n, t1, t2, np.zeros(3)])
    moments = np.column_stack(
        [np.cross(lever, n), np.cross(lever, t1), np.cross(lever, t2), n]
    )
    return np.vstack([forces, moments])


def grasp_matrix(contacts, center=None):
    """G (6 x 4k) mapping stacked contact forces F_c to the object wrench."""
    if not contacts:
        raise ValueError("A grasp needs at least one contact.")
    return np.hstack([contact_grasp_block(c, center) for c in contacts])


def object_wrench(grasp, contact_forces):
    """F_o = G F_c."""
    return grasp @ np.asarray(contact_forces, dtype=float).reshape(-1)


def contact_jacobian(chain, contact, angles=None):
    """
    S_i J_i expressed in the contact frame (4 x t).

    Rows: contact-point velocity along n, t1, t2 and spin about n.
    """
    full = jacobian(chain, angles)
    n, t1, t2 = contact_frame(contact.normal)
    frame = np.zeros((6, 6))
    frame[:3, :3] = np.vstack([n, t1, t2])
    frame[3:, 3:] = np.vstack([n, t1, t2])
    return SOFT_FINGER_SELECTION @ frame @ full


def hand_jacobian(model, angles=None):
    """diag[S_1 J_1, ..., S_k J_k] for a GraspModel."""
    if angles is None:
        angles = [None] * len(model.fingers)
    return block_diag(
        *[
            contact_jacobian(finger, contact, finger_angles)
            for finger, contact, finger_angles in zip(
                model.fingers, model.contacts, angles
            )
        ]
    )


def solve_grasp_rates(grasp, hand, object_velocity):
    """
    x_dot = G^T u, then the least-squares joint rates of J q_dot = x_dot.

    Rank-deficient J gives the minimum-norm solution; the numerical rank is
    reported either way.
    """
    velocity = np.asarray(object_velocity, dtype=float).reshape(6)
    contact_velocity = grasp.T @ velocity
    rates, _, rank, _ = np.linalg.lstsq(hand, contact_velocity, rcond=None)
    residual = float(np.linalg.norm(hand @ rates - contact_velocity))
    full_rank = rank == min(hand.shape)
    if not full_rank:
        logger.info("Hand Jacobian is rank deficient (%d < %d).", rank, min(hand.shape))
    return GraspRates(
        contact_velocity=contact_velocity,
        joint_rates=rates,
        rank=int(rank),
        full_rank=bool(full_rank),
        residual=residual,
    )


def grasp_rank(grasp):
    return int(np.linalg.matrix_rank(grasp))
