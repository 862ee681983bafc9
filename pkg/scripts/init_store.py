#!/usr/bin/env python3
"""Initialize the report store schema."""

import asyncio
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from slocc.services.result_store import ResultStore


async def main():
    print("Initializing SLOCC report store...")
    store = ResultStore()
    await store.initialize()
    print(f"Store created at: {store.db_path}")
    print("Done!")


if __name__ == "__main__":
    asyncio.run(main())
