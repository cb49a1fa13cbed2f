// Deterministic node-link layout for the DAG view: x advances with
// chronological rank (ties broken by id, matching the server's ordering
// rule), y is the category lane. Same input, same pixels — screenshots
// are reproducible.

import { categoryOf, type Category } from "./categories.js";
import { compareBeads, type ApiBead, type EdgeDto } from "./types.js";

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
  category: Category;
}

export interface LayoutEdge {
  child: string;
  parent: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface GraphLayout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  width: number;
  height: number;
}

const LANES: Record<Category, number> = {
  registration: 3,
  encounter: 0,
  condition: 1,
  medication: 2,
  observation: 4,
  procedure: 5,
  other: 6,
};

export const NODE_SPACING_X = 70;
export const LANE_SPACING_Y = 64;
export const MARGIN = 40;

export function layoutGraph(beads: ApiBead[], edges: EdgeDto[]): GraphLayout {
  const ordered = [...beads].sort(compareBeads);
  const nodes: LayoutNode[] = ordered.map((bead, rank) => {
    const category = categoryOf(bead.type);
    return {
      id: bead.id,
      x: MARGIN + rank * NODE_SPACING_X,
      y: MARGIN + LANES[category] * LANE_SPACING_Y,
      category,
    };
  });
  const positions = new Map(nodes.map((n) => [n.id, n]));
  const laidOut: LayoutEdge[] = [];
  for (const edge of edges) {
    const parent = positions.get(edge.parent);
    const child = positions.get(edge.child);
    if (!parent || !child) continue; // edges are restricted to returned beads
    laidOut.push({
      child: edge.child,
      parent: edge.parent,
      x1: parent.x,
      y1: parent.y,
      x2: child.x,
      y2: child.y,
    });
  }
  laidOut.sort((a, b) =>
    a.child === b.child ? (a.parent < b.parent ? -1 : 1) : a.child < b.child ? -1 : 1,
  );
  return {
    nodes,
    edges: laidOut,
    width: MARGIN * 2 + Math.max(0, nodes.length - 1) * NODE_SPACING_X,
    height: MARGIN * 2 + 6 * LANE_SPACING_Y,
  };
}
