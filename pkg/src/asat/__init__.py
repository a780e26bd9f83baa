"""asat: area situational awareness toolkit.

Models multi-source area data (disease counts, demographics, mobility,
social posts) as a typed geo graph, learns area awareness scores with a
small conditional GAN, encodes each area against its nearby peers with a
bilinear-attention auto-encoder, and serves hierarchical risk indexes
over HTTP and a CLI.
"""

__version__ = "0.1.0"
